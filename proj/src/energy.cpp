#include "epirelax/energy.hpp"

#include <algorithm>

namespace epirelax {

void PiecewiseDensity::validate() const {
    if (xs.size() < 2 || values.size() + 1 != xs.size())
        fail("SizeMismatch", "piecewise density needs n+1 breakpoints for n values");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) fail("NonMonotoneBreakpoints", "density breakpoints not increasing");
    for (double v : values)
        if (v < 0.0) fail("NegativeHeight", "density must be >= 0");
}

double PiecewiseDensity::value_at(double x) const {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t j = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    return values[std::min(j, values.size() - 1)];
}

void RegularConfiguration::validate() const {
    if (!profile.is_lipschitz()) fail("NonRegularProfile", "profile has jumps or cuts");
    density.validate();
    if (std::abs(density.xs.front() - profile.a()) > 1e-9 ||
        std::abs(density.xs.back() - profile.b()) > 1e-9)
        fail("SizeMismatch", "density breakpoints must span the profile domain");
}

AdatomMeasure RegularConfiguration::as_measure() const {
    validate();
    // Split the graph polyline at density breakpoints so each segment carries
    // one value.
    Polyline graph = profile.graph_polyline();
    std::vector<GraphSegment> segs;
    std::vector<double> dens;
    std::size_t leg = 1;
    Polyline cur{graph.front()};
    for (std::size_t piece = 0; piece < density.values.size(); ++piece) {
        double xr = density.xs[piece + 1];
        while (leg < graph.size() && graph[leg].x <= xr + 1e-15) {
            if (graph[leg].x > cur.back().x) cur.push_back(graph[leg]);
            ++leg;
        }
        if (cur.back().x < xr - 1e-15 && leg < graph.size()) {
            const Point& p0 = graph[leg - 1];
            const Point& p1 = graph[leg];
            double t = (xr - p0.x) / (p1.x - p0.x);
            cur.push_back(Point{xr, p0.y + t * (p1.y - p0.y)});
        }
        if (cur.size() >= 2) {
            segs.push_back(GraphSegment{SegmentKind::Regular, cur, 0.0});
            dens.push_back(density.values[piece]);
        }
        cur = Polyline{cur.back()};
    }
    auto g = std::make_shared<ExtendedGraph>(std::move(segs));
    return AdatomMeasure(g, std::move(dens), {});
}

double surface_energy_unrelaxed(const RegularConfiguration& cfg, const SurfaceDensity& psi) {
    cfg.validate();
    AdatomMeasure mu = cfg.as_measure();
    KahanSum s;
    const auto& segs = mu.graph().segments();
    for (std::size_t i = 0; i < segs.size(); ++i) s.add(psi(mu.density()[i]) * segs[i].length);
    return s.value();
}

EnergyBreakdown surface_energy_relaxed(const AdatomMeasure& mu, const EnvelopeTable& env) {
    EnergyBreakdown out;
    KahanSum sr, sj, sc;
    const auto& segs = mu.graph().segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        double u = mu.density()[i];
        switch (segs[i].kind) {
            case SegmentKind::Regular: sr.add(env.psi_tilde(u) * segs[i].length); break;
            case SegmentKind::Jump: sj.add(env.psi_tilde(u) * segs[i].length); break;
            case SegmentKind::Cut: sc.add(psi_c(env, u) * segs[i].length); break;
        }
    }
    KahanSum atom_mass;
    for (const Atom& a : mu.atoms()) atom_mass.add(a.mass);
    out.surface_regular = sr.value();
    out.surface_jump = sj.value();
    out.surface_cut = sc.value();
    out.singular_part = env.theta() * atom_mass.value();
    out.total = out.surface_total();
    return out;
}

EnergyBreakdown total_energy_F(const RegularConfiguration& cfg, const SurfaceDensity& psi,
                               const ElasticityTensor& C) {
    EnergyBreakdown out;
    out.surface_regular = surface_energy_unrelaxed(cfg, psi);
    if (cfg.mesh && cfg.displacement) {
        out.bulk = elastic_energy(*cfg.mesh, *cfg.displacement, C);
        out.bulk_evaluated = true;
    }
    out.total = out.bulk + out.surface_total();
    return out;
}

EnergyBreakdown total_energy_G(const Profile& p, const AdatomMeasure& mu,
                               const EnvelopeTable& env, const ElasticityTensor& C,
                               const FilmMesh* mesh, const DisplacementField* v) {
    EnergyBreakdown out = surface_energy_relaxed(mu, env);
    // The bulk term needs a W^{1,2} field on the subgraph; without a
    // Lipschitz profile it stays unevaluated rather than meshing cut domains.
    if (mesh && v && p.is_lipschitz()) {
        out.bulk = elastic_energy(*mesh, *v, C);
        out.bulk_evaluated = true;
    }
    out.total = out.bulk + out.surface_total();
    return out;
}

}  // namespace epirelax
