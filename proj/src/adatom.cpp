#include "epirelax/adatom.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <map>

namespace epirelax {

namespace {

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    double vx = b.x - a.x, vy = b.y - a.y;
    double L2 = vx * vx + vy * vy;
    if (L2 == 0.0) return dist(p, a);
    double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / L2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

double point_polyline_distance(const Point& p, const Polyline& pts) {
    double d = kInf;
    for (std::size_t i = 1; i < pts.size(); ++i)
        d = std::min(d, point_segment_distance(p, pts[i - 1], pts[i]));
    return d;
}

}  // namespace

AdatomMeasure::AdatomMeasure(std::shared_ptr<const ExtendedGraph> graph,
                             std::vector<double> density, std::vector<Atom> atoms)
    : graph_(std::move(graph)), density_(std::move(density)), atoms_(std::move(atoms)) {
    if (!graph_) fail("AtomOffGraph", "measure needs a graph");
    if (density_.size() != graph_->segments().size())
        fail("AtomOffGraph", "density size does not match segment count");
    for (double u : density_)
        if (u < 0.0) fail("NegativeHeight", "adatom density must be >= 0");
    for (const Atom& a : atoms_) {
        if (!(a.mass > 0.0)) fail("AtomOffGraph", "atom masses must be > 0");
        double d;
        nearest_segment(a.pos, &d);
        if (d > 1e-9) fail("AtomOffGraph", "atom lies off the graph");
    }
}

std::size_t AdatomMeasure::nearest_segment(const Point& p, double* dist_out) const {
    double best = kInf;
    std::size_t arg = 0;
    const auto& segs = graph_->segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        double d = point_polyline_distance(p, segs[i].pts);
        if (d < best) {
            best = d;
            arg = i;
        }
    }
    if (dist_out) *dist_out = best;
    return arg;
}

namespace {

// Distance of the graph's degeneracy-relevant features to the nearest grid
// line: axis-parallel legs and the breakpoint/jump/cut endpoints (interior
// polyline vertices cross transversally and are harmless, as are the closure
// points at the domain ends). Zero means degenerate.
double offset_margin(const ExtendedGraph& g, const GridSpec& grid) {
    auto line_dist = [&](double v, double o) {
        double t = (v - o) / grid.r;
        return std::abs(t - std::round(t)) * grid.r;
    };
    const double ends_tol = 1e-12 * std::max(1.0, std::abs(g.bbox().xmax));
    const double xmin = g.bbox().xmin, xmax = g.bbox().xmax;
    double margin = kInf;
    for (const GraphSegment& s : g.segments()) {
        for (const Point& q : {s.pts.front(), s.pts.back()}) {
            bool domain_end =
                std::abs(q.x - xmin) <= ends_tol || std::abs(q.x - xmax) <= ends_tol;
            if (!domain_end)
                margin = std::min({margin, line_dist(q.x, grid.ox), line_dist(q.y, grid.oy)});
        }
        for (std::size_t i = 1; i < s.pts.size(); ++i) {
            const Point& p0 = s.pts[i - 1];
            const Point& p1 = s.pts[i];
            if (std::abs(p0.y - p1.y) <= 1e-14 && p1.x > p0.x)
                margin = std::min(margin, line_dist(p0.y, grid.oy));
            if (std::abs(p0.x - p1.x) <= 1e-14 && dist(p0, p1) > 1e-14)
                margin = std::min(margin, line_dist(p0.x, grid.ox));
        }
    }
    return margin;
}

}  // namespace

bool grid_admissible_for(const ExtendedGraph& g, const GridSpec& grid, double tol) {
    return offset_margin(g, grid) > tol;
}

GridSpec admissible_grid(const ExtendedGraph& g, double r, int max_tries) {
    if (!(r > 0.0)) fail("NonPositiveEps", "grid cell size must be > 0");
    // First offset with a healthy margin; merely-admissible offsets leave
    // sliver cells that force impractically fine approximation stages.
    GridSpec best{r, 0.0, 0.0};
    double best_margin = -1.0;
    for (int k = 0; k <= max_tries; ++k) {
        GridSpec grid{r, static_cast<double>(k) * r / 1009.0, static_cast<double>(k) * r / 1013.0};
        double margin = offset_margin(g, grid);
        if (margin >= 0.125 * r) return grid;
        if (margin > best_margin) {
            best_margin = margin;
            best = grid;
        }
    }
    if (best_margin > 1e-9 * r) return best;
    fail("NoAdmissibleOffsetFound",
         "no admissible offset after " + std::to_string(max_tries) + " tries");
}

namespace {

// Split one straight leg at every interior grid crossing. Admissibility puts
// endpoints strictly inside cells, so crossings are transversal.
void split_leg(const Point& p0, const Point& p1, const GridSpec& grid,
               std::vector<Point>& out) {
    std::vector<double> ts{0.0, 1.0};
    auto add_crossings = [&](double a0, double a1, double o) {
        double lo = std::min(a0, a1), hi = std::max(a0, a1);
        long i0 = static_cast<long>(std::ceil((lo - o) / grid.r));
        long i1 = static_cast<long>(std::floor((hi - o) / grid.r));
        for (long i = i0; i <= i1; ++i) {
            double line = o + static_cast<double>(i) * grid.r;
            if (a1 != a0) {
                double t = (line - a0) / (a1 - a0);
                if (t > 1e-14 && t < 1.0 - 1e-14) ts.push_back(t);
            }
        }
    };
    add_crossings(p0.x, p1.x, grid.ox);
    add_crossings(p0.y, p1.y, grid.oy);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-14; }),
             ts.end());
    for (double t : ts)
        out.push_back(Point{p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)});
}

}  // namespace

ExtendedGraph refine_at_grid(const ExtendedGraph& g, const GridSpec& grid) {
    std::vector<GraphSegment> segs;
    for (const GraphSegment& s : g.segments()) {
        for (std::size_t i = 1; i < s.pts.size(); ++i) {
            std::vector<Point> pts;
            split_leg(s.pts[i - 1], s.pts[i], grid, pts);
            for (std::size_t j = 1; j < pts.size(); ++j)
                segs.push_back(GraphSegment{s.kind, {pts[j - 1], pts[j]}, 0.0});
        }
    }
    return ExtendedGraph(std::move(segs));
}

AdatomMeasure grid_constant_projection(const ExtendedGraph& g, const AdatomMeasure& mu,
                                       const GridSpec& grid) {
    if (!grid_admissible_for(g, grid)) fail("NoAdmissibleOffsetFound", "grid not admissible for graph");

    // Refine the measured graph so each piece lies in one cell; pieces are
    // emitted leg by leg in segment order, so densities carry over directly.
    const auto& src = mu.graph().segments();
    std::vector<GraphSegment> pieces;
    std::vector<double> piece_density;
    for (std::size_t si = 0; si < src.size(); ++si) {
        for (std::size_t i = 1; i < src[si].pts.size(); ++i) {
            std::vector<Point> pts;
            split_leg(src[si].pts[i - 1], src[si].pts[i], grid, pts);
            for (std::size_t j = 1; j < pts.size(); ++j) {
                pieces.push_back(GraphSegment{src[si].kind, {pts[j - 1], pts[j]}, 0.0});
                piece_density.push_back(mu.density()[si]);
            }
        }
    }
    auto refined = std::make_shared<ExtendedGraph>(std::move(pieces));

    // Key: (cell i, cell j, cut?) -> aggregate mass and length.
    struct CellAgg {
        KahanSum mass;
        KahanSum length;
        double umin = kInf, umax = -kInf;
        double atom_mass = 0.0;
    };
    std::map<std::array<long, 3>, CellAgg> cells;
    const auto& rsegs = refined->segments();
    std::vector<std::array<long, 3>> piece_key(rsegs.size());
    for (std::size_t i = 0; i < rsegs.size(); ++i) {
        const GraphSegment& s = rsegs[i];
        Point mid{0.5 * (s.pts.front().x + s.pts.back().x),
                  0.5 * (s.pts.front().y + s.pts.back().y)};
        std::array<long, 3> key{grid.cell_x(mid.x), grid.cell_y(mid.y),
                                s.kind == SegmentKind::Cut ? 1L : 0L};
        piece_key[i] = key;
        CellAgg& agg = cells[key];
        agg.mass.add(piece_density[i] * s.length);
        agg.length.add(s.length);
        agg.umin = std::min(agg.umin, piece_density[i]);
        agg.umax = std::max(agg.umax, piece_density[i]);
    }
    for (const Atom& a : mu.atoms()) {
        std::size_t si = mu.nearest_segment(a.pos);
        bool cut = src[si].kind == SegmentKind::Cut;
        std::array<long, 3> key{grid.cell_x(a.pos.x), grid.cell_y(a.pos.y), cut ? 1L : 0L};
        auto it = cells.find(key);
        if (it == cells.end())
            fail("AtomOffGraph", "atom cell carries no graph length of its part");
        it->second.atom_mass += a.mass;
    }

    std::vector<double> out_density(rsegs.size());
    for (std::size_t i = 0; i < rsegs.size(); ++i) {
        const CellAgg& agg = cells.at(piece_key[i]);
        // Already cell-constant and atom-free: return the value bitwise so the
        // projection is idempotent.
        if (agg.atom_mass == 0.0 && agg.umin == agg.umax)
            out_density[i] = agg.umin;
        else
            out_density[i] = (agg.mass.value() + agg.atom_mass) / agg.length.value();
    }
    return AdatomMeasure(refined, std::move(out_density), {});
}

double total_mass(const AdatomMeasure& mu) {
    KahanSum s;
    const auto& segs = mu.graph().segments();
    for (std::size_t i = 0; i < segs.size(); ++i) s.add(mu.density()[i] * segs[i].length);
    for (const Atom& a : mu.atoms()) s.add(a.mass);
    return s.value();
}

TestFunctionBank default_bank(const BoundingBox& box, double r) {
    TestFunctionBank bank;
    double w = std::max(box.width(), 1e-12);
    double h = std::max(box.height(), 1e-12);
    double x0 = box.xmin, y0 = box.ymin;
    auto xn = [=](double x) { return (x - x0) / w; };
    auto yn = [=](double y) { return (y - y0) / h; };

    bank.fns.push_back({"1", [](double, double) { return 1.0; }});
    bank.fns.push_back({"x", [](double x, double) { return x; }});
    bank.fns.push_back({"y", [](double, double y) { return y; }});
    bank.fns.push_back({"x^2", [](double x, double) { return x * x; }});
    bank.fns.push_back({"xy", [](double x, double y) { return x * y; }});
    bank.fns.push_back({"y^2", [](double, double y) { return y * y; }});
    bank.fns.push_back({"sin(pi x)", [=](double x, double) { return std::sin(M_PI * xn(x)); }});
    bank.fns.push_back({"cos(pi x)", [=](double x, double) { return std::cos(M_PI * xn(x)); }});
    bank.fns.push_back({"sin(pi y)", [=](double, double y) { return std::sin(M_PI * yn(y)); }});
    bank.fns.push_back({"cos(pi y)", [=](double, double y) { return std::cos(M_PI * yn(y)); }});

    double sigma = 0.5 * r;
    int id = 0;
    for (double fx : {0.25, 0.75})
        for (double fy : {0.25, 0.75}) {
            double cx = x0 + fx * w, cy = y0 + fy * h;
            bank.fns.push_back({"bump" + std::to_string(id++), [=](double x, double y) {
                                    double dx = (x - cx) / sigma, dy = (y - cy) / sigma;
                                    return std::exp(-0.5 * (dx * dx + dy * dy));
                                }});
        }
    return bank;
}

namespace {

// 32-point Gauss-Legendre on [-1, 1].
struct GL32 {
    std::array<double, 32> x{}, w{};
    GL32() {
        // Newton iteration on Legendre P32; nodes symmetric.
        const int n = 32;
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int j = 2; j <= n; ++j) {
                    double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[i] = -t;
            x[n - 1 - i] = t;
            w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

const GL32& gl32() {
    static const GL32 rule;
    return rule;
}

double integrate_leg(const Point& a, const Point& b, const TestFunction& fn) {
    double L = dist(a, b);
    if (L == 0.0) return 0.0;
    const GL32& g = gl32();
    KahanSum s;
    for (int i = 0; i < 32; ++i) {
        double t = 0.5 * (g.x[i] + 1.0);
        s.add(g.w[i] * fn.f(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
    }
    return 0.5 * L * s.value();
}

}  // namespace

double integrate(const AdatomMeasure& mu, const TestFunction& fn) {
    KahanSum s;
    const auto& segs = mu.graph().segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (mu.density()[i] == 0.0) continue;
        for (std::size_t j = 1; j < segs[i].pts.size(); ++j)
            s.add(mu.density()[i] * integrate_leg(segs[i].pts[j - 1], segs[i].pts[j], fn));
    }
    for (const Atom& a : mu.atoms()) s.add(a.mass * fn.f(a.pos.x, a.pos.y));
    return s.value();
}

double weak_star_gap(const AdatomMeasure& mu1, const AdatomMeasure& mu2,
                     const TestFunctionBank& bank) {
    if (bank.fns.empty()) fail("EmptyBank", "test function bank is empty");
    double gap = 0.0;
    for (const TestFunction& fn : bank.fns)
        gap = std::max(gap, std::abs(integrate(mu1, fn) - integrate(mu2, fn)));
    return gap;
}

}  // namespace epirelax
