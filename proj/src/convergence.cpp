#include "epirelax/convergence.hpp"

#include <algorithm>
#include <cmath>

namespace epirelax {

namespace {

// 1D squared Euclidean distance transform (lower parabola envelope) with
// physical coordinates xs[i] = i * h.
void edt_1d(const std::vector<double>& f, double h, std::vector<double>& out,
            std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    auto X = [&](int i) { return h * static_cast<double>(i); };

    int q0 = 0;
    while (q0 < n && std::isinf(f[q0])) ++q0;
    if (q0 == n) {
        out.assign(n, kInf);
        return;
    }
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int ktop = 0;
    v[0] = q0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = q0 + 1; q < n; ++q) {
        if (std::isinf(f[q])) continue;
        double s = 0.0;
        while (true) {
            int p = v[ktop];
            s = ((f[q] + X(q) * X(q)) - (f[p] + X(p) * X(p))) / (2.0 * X(q) - 2.0 * X(p));
            if (s <= z[ktop] && ktop > 0)
                --ktop;
            else
                break;
        }
        ++ktop;  // s > z[0] = -inf always holds once the stack is down to one
        v[ktop] = q;
        z[ktop] = s;
        z[ktop + 1] = kInf;
    }
    out.resize(n);
    int k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < X(q)) ++k;
        double d = X(q) - X(v[k]);
        out[q] = d * d + f[v[k]];
    }
}

// Squared distance to the marked set on an nx x ny grid.
std::vector<double> edt_2d(const std::vector<char>& mask, int nx, int ny, double hx, double hy) {
    std::vector<double> d(static_cast<std::size_t>(nx) * ny);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = mask[i] ? 0.0 : kInf;

    std::vector<double> col(ny), out(ny);
    std::vector<int> v;
    std::vector<double> z;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) col[j] = d[static_cast<std::size_t>(j) * nx + i];
        edt_1d(col, hy, out, v, z);
        for (int j = 0; j < ny; ++j) d[static_cast<std::size_t>(j) * nx + i] = out[j];
    }
    std::vector<double> row(nx), rout(nx);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) row[i] = d[static_cast<std::size_t>(j) * nx + i];
        edt_1d(row, hx, rout, v, z);
        for (int i = 0; i < nx; ++i) d[static_cast<std::size_t>(j) * nx + i] = rout[i];
    }
    return d;
}

// Minimum of the lsc representative over an x-window; linear pieces attain
// extremes at clipped endpoints, and node point values cover the cuts.
double min_height_in(const Profile& p, double x0, double x1) {
    double m = kInf;
    for (const Polyline& arc : p.arcs()) {
        if (arc.back().x < x0 || arc.front().x > x1) continue;
        m = std::min({m, p.value(std::max(x0, arc.front().x)),
                      p.value(std::min(x1, arc.back().x))});
        for (const Point& q : arc)
            if (q.x >= x0 && q.x <= x1) m = std::min(m, q.y);
    }
    for (const ProfileNode& nd : p.nodes())
        if (nd.x >= x0 && nd.x <= x1) m = std::min(m, nd.value);
    return m;
}

std::vector<char> complement_mask(const Profile& p, const BoundingBox& box, int n) {
    std::vector<char> mask(static_cast<std::size_t>(n) * n, 0);
    double hx = box.width() / (n - 1);
    double hy = box.height() / (n - 1);
    // Column slabs rather than point samples: a grid point is film only when
    // it lies below the slab minimum of h, so hairline cuts stay visible at
    // finite resolution (the slab dilation is within the reported error).
    std::vector<double> hmin(n, -kInf);
    for (int i = 0; i < n; ++i) {
        double x = box.xmin + hx * i;
        if (x > p.a() && x < p.b())
            hmin[i] = min_height_in(p, std::max(p.a(), x - 0.5 * hx),
                                    std::min(p.b(), x + 0.5 * hx));
    }
    for (int j = 0; j < n; ++j) {
        double y = box.ymin + hy * j;
        for (int i = 0; i < n; ++i)
            mask[static_cast<std::size_t>(j) * n + i] = y < hmin[i] ? 0 : 1;
    }
    return mask;
}

}  // namespace

HausdorffResult hausdorff_complement_distance(const Profile& pA, const Profile& pB,
                                              const BoundingBox& box, int n) {
    if (n < 64) fail("BoxTooSmall", "grid resolution must be >= 64");
    double margin_x = box.width() / n;
    double margin_y = box.height() / n;
    for (const Profile* p : {&pA, &pB}) {
        if (box.xmin > p->a() - margin_x || box.xmax < p->b() + margin_x ||
            box.ymax < p->max_height() + margin_y || box.ymin > 0.0 - margin_y)
            fail("BoxTooSmall", "box must contain both graphs with margin");
    }

    double hx = box.width() / (n - 1);
    double hy = box.height() / (n - 1);
    std::vector<char> A = complement_mask(pA, box, n);
    std::vector<char> B = complement_mask(pB, box, n);
    std::vector<double> dB = edt_2d(B, n, n, hx, hy);
    std::vector<double> dA = edt_2d(A, n, n, hx, hy);

    double sup = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i]) sup = std::max(sup, dB[i]);
        if (B[i]) sup = std::max(sup, dA[i]);
    }
    HausdorffResult res;
    res.distance = std::sqrt(sup);
    res.grid_error = 2.0 * box.diag() / n;
    return res;
}

namespace {

double right_value(const Profile& p, double x) {
    // One-sided values drive the integrals; point values at breakpoints have
    // zero measure.
    return p.right_limit_at(x);
}

}  // namespace

double l1_subgraph_distance(const Profile& pA, const Profile& pB) {
    if (std::abs(pA.a() - pB.a()) > 1e-12 || std::abs(pA.b() - pB.b()) > 1e-12)
        fail("DomainMismatch", "profiles live on different domains");

    std::vector<double> xs;
    for (const Profile* p : {&pA, &pB})
        for (const Polyline& arc : p->arcs())
            for (const Point& q : arc) xs.push_back(q.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-15; }),
             xs.end());

    KahanSum s;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        double x0 = xs[i - 1], x1 = xs[i];
        double d0 = right_value(pA, x0) - right_value(pB, x0);
        // Left limits at the right end keep the difference linear on the piece.
        double d1 = pA.left_limit_at(x1) - pB.left_limit_at(x1);
        double w = x1 - x0;
        if (d0 * d1 >= 0.0) {
            s.add(0.5 * std::abs(d0 + d1) * w);
        } else {
            double t = d0 / (d0 - d1);  // root of the linear difference
            s.add(0.5 * std::abs(d0) * t * w);
            s.add(0.5 * std::abs(d1) * (1.0 - t) * w);
        }
    }
    return s.value();
}

double trend_slope(const std::vector<int>& ks, const std::vector<double>& values) {
    const std::size_t n = ks.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(static_cast<double>(ks[i]));
        my += values[i];
    }
    mx /= n;
    my /= n;
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = std::log(static_cast<double>(ks[i])) - mx;
        cov += dx * (values[i] - my);
        var += dx * dx;
    }
    return var > 0.0 ? cov / var : 0.0;
}

ConvergenceReport verify_sequence(const std::vector<RegularConfiguration>& seq,
                                  const std::vector<int>& ks, const Profile& limit_profile,
                                  const AdatomMeasure& limit_measure, const SurfaceDensity& psi,
                                  const EnvelopeTable& env, const VerifyOptions& opts) {
    if (seq.empty()) fail("EmptySequence", "verify_sequence needs at least one configuration");
    if (seq.size() != ks.size()) fail("EmptySequence", "one k per configuration required");

    ConvergenceReport rep;
    EnergyBreakdown G = surface_energy_relaxed(limit_measure, env);
    rep.G_limit = G.total;
    const double m = total_mass(limit_measure);
    const double M = area_above_zero(limit_profile);

    BoundingBox box = limit_measure.graph().bbox();
    for (const RegularConfiguration& cfg : seq)
        box.absorb(decompose(cfg.profile).bbox());
    box.absorb(Point{limit_profile.a(), 0.0});
    double padx = std::max(0.25 * box.width(), 0.05);
    double pady = std::max(0.25 * std::max(box.height(), 0.1), 0.05);
    box.xmin -= padx;
    box.xmax += padx;
    box.ymin -= pady;
    box.ymax += pady;

    TestFunctionBank bank = default_bank(box, std::max(box.width(), box.height()) / 8.0);

    for (std::size_t i = 0; i < seq.size(); ++i) {
        const RegularConfiguration& cfg = seq[i];
        ConvergenceRow row;
        row.k = ks[i];
        row.hausdorff_complement =
            hausdorff_complement_distance(cfg.profile, limit_profile, box, opts.hausdorff_n).distance;
        row.l1_subgraph = l1_subgraph_distance(cfg.profile, limit_profile);
        AdatomMeasure mu_k = cfg.as_measure();
        row.weakstar_gap = weak_star_gap(mu_k, limit_measure, bank);
        row.F_total = surface_energy_unrelaxed(cfg, psi);
        row.G_limit = rep.G_limit;
        row.mass_error = std::abs(total_mass(mu_k) - m);
        row.area_error = std::abs(area_above_zero(cfg.profile) - M);
        rep.rows.push_back(row);
    }

    std::vector<double> gaps, hgaps, wgaps;
    for (const ConvergenceRow& r : rep.rows) {
        gaps.push_back(std::abs(r.F_total - rep.G_limit));
        hgaps.push_back(r.hausdorff_complement);
        wgaps.push_back(r.weakstar_gap);
    }

    double final_gap = gaps.back();
    double denom = std::max(std::abs(rep.G_limit), 1e-30);
    std::size_t half = rep.rows.size() / 2;
    std::vector<int> tail_ks(ks.begin() + half, ks.end());
    std::vector<double> tail_gaps(gaps.begin() + half, gaps.end());
    bool trend_down = tail_ks.size() < 2 || trend_slope(tail_ks, tail_gaps) <= 1e-12 ||
                      final_gap <= opts.trend_atol;
    rep.limsup_ok = (final_gap / denom <= opts.limsup_rel_tol) && trend_down;

    rep.liminf_ok = true;
    for (const ConvergenceRow& r : rep.rows)
        if (r.F_total < rep.G_limit - opts.liminf_tol) rep.liminf_ok = false;

    rep.constraints_ok = true;
    for (const ConvergenceRow& r : rep.rows)
        if (r.mass_error > opts.constraint_tol || r.area_error > opts.constraint_tol)
            rep.constraints_ok = false;

    auto decreasing = [&](const std::vector<double>& v) {
        if (v.back() <= opts.trend_atol) return true;
        return ks.size() < 2 || trend_slope(ks, v) < 0.0;
    };
    rep.topology_ok = decreasing(hgaps) && decreasing(wgaps);
    return rep;
}

}  // namespace epirelax
