#include "epirelax/recovery.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <map>
#include <thread>

#include "epirelax/convergence.hpp"

namespace epirelax {

namespace {

constexpr double kTiny = 1e-15;

double lerp_y(const Point& p0, const Point& p1, double x) {
    if (p1.x == p0.x) return std::min(p0.y, p1.y);
    double t = (x - p0.x) / (p1.x - p0.x);
    return p0.y + t * (p1.y - p0.y);
}

double value_on(const Polyline& pts, double x) {
    if (x <= pts.front().x) return pts.front().y;
    if (x >= pts.back().x) return pts.back().y;
    auto it = std::upper_bound(pts.begin(), pts.end(), x,
                               [](double v, const Point& q) { return v < q.x; });
    std::size_t j = static_cast<std::size_t>(it - pts.begin());
    return lerp_y(pts[j - 1], pts[j], x);
}

Polyline slice(const Polyline& pts, double x0, double x1) {
    Polyline out;
    out.push_back(Point{x0, value_on(pts, x0)});
    for (const Point& q : pts)
        if (q.x > x0 + kTiny && q.x < x1 - kTiny) out.push_back(q);
    out.push_back(Point{x1, value_on(pts, x1)});
    return out;
}

void dedupe(Polyline& pts) {
    Polyline out;
    for (const Point& q : pts) {
        if (!out.empty() && std::abs(out.back().x - q.x) <= kTiny &&
            std::abs(out.back().y - q.y) <= 1e-13)
            continue;
        out.push_back(q);
    }
    pts = std::move(out);
}

// ----------------------------------------------------------------- Yosida --

// Forward sweep F(x) = inf_{z <= x} (h(z) + k (x - z)) over a vertex list
// that may contain zero-width vertical legs (one-sided limits at jumps).
Polyline sweep_forward(const Polyline& h, double k) {
    Polyline F;
    double cur = h.front().y;
    F.push_back(Point{h.front().x, cur});
    for (std::size_t i = 1; i < h.size(); ++i) {
        const Point& p0 = h[i - 1];
        const Point& p1 = h[i];
        double dx = p1.x - p0.x;
        if (dx <= kTiny) {
            cur = std::min(cur, p1.y);
            F.push_back(Point{p1.x, cur});
            continue;
        }
        double s = (p1.y - p0.y) / dx;
        if (s > k) {
            cur += k * dx;
            F.push_back(Point{p1.x, cur});
            continue;
        }
        if (cur >= p0.y - 1e-13) {
            // Riding the graph: the slope-k ray from here never dips below it.
            cur = p1.y;
            F.push_back(p1);
            continue;
        }
        if (k - s <= kTiny) {
            cur += k * dx;
            F.push_back(Point{p1.x, cur});
            continue;
        }
        double xc = p0.x + (p0.y - cur) / (k - s);
        if (xc >= p1.x - kTiny) {
            cur += k * dx;
            F.push_back(Point{p1.x, cur});
        } else {
            F.push_back(Point{xc, cur + k * (xc - p0.x)});
            cur = p1.y;
            F.push_back(p1);
        }
    }
    return F;
}

Polyline mirror_x(const Polyline& pts) {
    Polyline out(pts.rbegin(), pts.rend());
    for (Point& q : out) q.x = -q.x;
    return out;
}

// Line of the polyline leg covering the open interval (x0, x1). Both ends
// are vertices of the merged set, so no vertex lies strictly inside and the
// first vertex right of the midpoint closes the unique covering leg (for
// duplicate-x verticals this picks the one-sided value facing the interval).
void leg_values(const Polyline& pts, double x0, double x1, double& y0, double& y1) {
    double xm = 0.5 * (x0 + x1);
    auto it = std::upper_bound(pts.begin(), pts.end(), xm,
                               [](double v, const Point& q) { return v < q.x; });
    std::size_t j = static_cast<std::size_t>(it - pts.begin());
    j = std::clamp<std::size_t>(j, 1, pts.size() - 1);
    y0 = lerp_y(pts[j - 1], pts[j], x0);
    y1 = lerp_y(pts[j - 1], pts[j], x1);
}

Polyline polyline_min(const Polyline& A, const Polyline& B) {
    std::vector<double> xs;
    for (const Point& q : A) xs.push_back(q.x);
    for (const Point& q : B) xs.push_back(q.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::abs(a - b) <= kTiny; }),
             xs.end());

    Polyline out;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        double a0, a1, b0, b1;
        leg_values(A, xs[i - 1], xs[i], a0, a1);
        leg_values(B, xs[i - 1], xs[i], b0, b1);
        out.push_back(Point{xs[i - 1], std::min(a0, b0)});
        double d0 = a0 - b0, d1 = a1 - b1;
        if (d0 * d1 < 0.0) {
            double t = d0 / (d0 - d1);
            double xc = xs[i - 1] + t * (xs[i] - xs[i - 1]);
            out.push_back(Point{xc, a0 + t * (a1 - a0)});
        }
        if (i + 1 == xs.size()) out.push_back(Point{xs[i], std::min(a1, b1)});
    }
    dedupe(out);
    return out;
}

// Largest k-Lipschitz minorant of the region function described by the
// vertex list (with one-sided limit vertices at jumps).
Polyline slope_clip(const Polyline& h, double k) {
    Polyline F = sweep_forward(h, k);
    Polyline Bm = sweep_forward(mirror_x(h), k);
    Polyline B = mirror_x(Bm);
    return polyline_min(F, B);
}

// Vertex list of a profile over [x0, x1] including one-sided limits at
// interior breakpoints and explicit values at the slice ends.
Polyline region_vertices(const Profile& p, double x0, double y0, double x1, double y1) {
    Polyline out;
    out.push_back(Point{x0, y0});
    for (std::size_t ai = 0; ai < p.arcs().size(); ++ai) {
        const Polyline& arc = p.arcs()[ai];
        if (arc.back().x <= x0 + kTiny || arc.front().x >= x1 - kTiny) continue;
        double lo = std::max(x0, arc.front().x);
        double hi = std::min(x1, arc.back().x);
        Polyline part = slice(arc, lo, hi);
        for (const Point& q : part) out.push_back(q);
    }
    out.push_back(Point{x1, y1});
    // Sort is stable under the construction order; just squash duplicates.
    std::stable_sort(out.begin(), out.end(),
                     [](const Point& a, const Point& b) { return a.x < b.x - kTiny; });
    dedupe(out);
    return out;
}

std::vector<const ProfileNode*> cut_nodes(const Profile& p) {
    std::vector<const ProfileNode*> cuts;
    for (const ProfileNode& nd : p.nodes())
        if (std::min(nd.left, nd.right) - nd.value > kTiny) cuts.push_back(&nd);
    return cuts;
}

Profile profile_from_polyline(double a, double b, Polyline pts) {
    dedupe(pts);
    // A k-Lipschitz construction has no verticals; drop any fp leftovers
    // keeping the lower value.
    Polyline clean;
    for (const Point& q : pts) {
        if (!clean.empty() && q.x - clean.back().x <= kTiny) {
            clean.back().y = std::min(clean.back().y, std::max(0.0, q.y));
            continue;
        }
        clean.push_back(Point{q.x, std::max(0.0, q.y)});
    }
    clean.front().x = a;
    clean.back().x = b;
    ProfileSpec spec;
    spec.a = a;
    spec.b = b;
    spec.arcs.push_back(std::move(clean));
    return build_profile(spec);
}

}  // namespace

// --------------------------------------------------------------- reduction --

Profile finite_cut_reduction(const Profile& p, int k, double M) {
    if (k < 1) fail("NonPositiveEps", "finite_cut_reduction needs k >= 1");
    double area = area_above_zero(p);
    if (std::abs(area - M) > 1e-9 * std::max(1.0, std::abs(M)))
        fail("AreaMismatch", "M must equal the film area of the input profile");

    const double drop = 1.0 / static_cast<double>(k);
    ProfileSpec spec;
    spec.a = p.a();
    spec.b = p.b();
    for (const Polyline& arc : p.arcs()) {
        Polyline shifted;
        for (std::size_t i = 0; i < arc.size(); ++i) {
            if (i > 0) {
                // Insert the clamp crossing so max(h - 1/k, 0) stays polyline-exact.
                double y0 = arc[i - 1].y - drop, y1 = arc[i].y - drop;
                if ((y0 > 0.0) != (y1 > 0.0) && y0 != y1) {
                    double t = y0 / (y0 - y1);
                    shifted.push_back(Point{arc[i - 1].x + t * (arc[i].x - arc[i - 1].x), 0.0});
                }
            }
            shifted.push_back(Point{arc[i].x, std::max(arc[i].y - drop, 0.0)});
        }
        dedupe(shifted);
        if (shifted.size() < 2)
            shifted = {Point{arc.front().x, std::max(arc.front().y - drop, 0.0)},
                       Point{arc.back().x, std::max(arc.back().y - drop, 0.0)}};
        spec.arcs.push_back(std::move(shifted));
    }
    for (const ProfileNode& nd : p.nodes()) {
        double l = std::max(nd.left - drop, 0.0);
        double r = std::max(nd.right - drop, 0.0);
        double v = std::min(std::max(std::min(nd.left, nd.right) - drop, 0.0), nd.value);
        spec.nodes.push_back(ProfileNode{nd.x, l, r, v});
    }
    Profile hat = build_profile(spec);

    double eps = (M - area_above_zero(hat)) / (p.b() - p.a());
    if (eps < -1e-12)
        fail("NegativeEpsilonK", "area repair went negative; reduced profile exceeds the input");
    return hat.shifted_y(std::max(eps, 0.0));
}

// ------------------------------------------------------------ Lipschitz fit --

LipschitzApprox LipschitzApprox::shifted_y(double c) const {
    LipschitzApprox out;
    out.profile = profile.shifted_y(c);
    out.strips = strips;
    out.k = k;
    for (CutStrip& s : out.strips) s.bottom = std::max(0.0, s.bottom + c);
    return out;
}

LipschitzApprox lipschitz_approximation(const Profile& p, int k) {
    if (k < 2) fail("StripsOverlap", "lipschitz_approximation needs k >= 2");
    const double a = p.a(), b = p.b();
    const double K = static_cast<double>(k);
    auto cuts = cut_nodes(p);

    LipschitzApprox out;
    out.k = k;

    if (cuts.empty()) {
        Polyline verts = region_vertices(p, a, p.right_limit_at(a), b, p.left_limit_at(b));
        out.profile = profile_from_polyline(a, b, slope_clip(verts, K));
        return out;
    }

    double eps0 = std::min(cuts.front()->x - a, b - cuts.back()->x);
    for (std::size_t i = 1; i < cuts.size(); ++i)
        eps0 = std::min(eps0, cuts[i]->x - cuts[i - 1]->x);
    double w = eps0 / K;
    for (std::size_t i = 1; i < cuts.size(); ++i)
        if (2.0 * w >= cuts[i]->x - cuts[i - 1]->x)
            fail("StripsOverlap", "interpolation strips overlap; increase k");
    if (w >= cuts.front()->x - a || w >= b - cuts.back()->x)
        fail("StripsOverlap", "interpolation strip leaves the domain; increase k");

    // Region boundaries: a, cut abscissae, b. The one-sided transforms see
    // the one-sided limits at the cuts, never the cut bottom; the descent to
    // (c, h(c)) happens entirely inside the strip chord.
    std::vector<double> bx{a};
    for (const ProfileNode* nd : cuts) bx.push_back(nd->x);
    bx.push_back(b);

    std::vector<Polyline> regions;
    for (std::size_t i = 1; i < bx.size(); ++i) {
        Polyline verts = region_vertices(p, bx[i - 1], p.right_limit_at(bx[i - 1]), bx[i],
                                         p.left_limit_at(bx[i]));
        regions.push_back(slope_clip(verts, K));
    }

    Polyline final_pts;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        double lo = bx[i] + (i == 0 ? 0.0 : w);
        double hi = bx[i + 1] - (i + 1 == bx.size() - 1 ? 0.0 : w);
        if (i > 0) final_pts.push_back(Point{bx[i], cuts[i - 1]->value});  // cut bottom
        Polyline part = slice(regions[i], lo, hi);
        for (const Point& q : part) final_pts.push_back(q);
    }
    dedupe(final_pts);
    out.profile = profile_from_polyline(a, b, std::move(final_pts));
    for (const ProfileNode* nd : cuts)
        out.strips.push_back(CutStrip{nd->x, w, nd->value});
    return out;
}

// ----------------------------------------------------------------- splits --

std::pair<double, double> cut_split(double u_cut, const EnvelopeTable& env) {
    if (u_cut < 0.0) fail("NegativeArgument", "cut density must be >= 0");
    double half = 0.5 * u_cut;
    double mid = 2.0 * env.psi_tilde(half);
    // The envelope is convex, so the midpoint minimises; keep a grid scan as
    // a guard for tables that lost convexity to fp noise.
    const int n = 2048;
    double best = mid, best_a = half;
    for (int i = 0; i <= n; ++i) {
        double av = half * static_cast<double>(i) / n;
        double val = env.psi_tilde(av) + env.psi_tilde(u_cut - av);
        if (val < best - 1e-12 * (1.0 + std::abs(best))) {
            best = val;
            best_a = av;
        }
    }
    if (best < mid - 1e-12 * (1.0 + std::abs(mid))) return {best_a, u_cut - best_a};
    return {half, half};
}

// ---------------------------------------------------------------- wriggle --

namespace {

double trapezoid_ramp(double x, double p, double q, double lam) {
    if (x <= p + lam) return std::max(0.0, (x - p) / lam);
    if (x >= q - lam) return std::max(0.0, (q - x) / lam);
    return 1.0;
}

Polyline build_panel(const Polyline& h_slice, double p, double q, double lam, double t,
                     double k) {
    std::vector<double> xs{p, p + lam, q - lam, q};
    for (const Point& v : h_slice)
        if (v.x > p + kTiny && v.x < q - kTiny) xs.push_back(v.x);
    if (t > 0.0) {
        double half_pi = 0.5 * M_PI;
        long j0 = static_cast<long>(std::ceil(p * t / half_pi));
        long j1 = static_cast<long>(std::floor(q * t / half_pi));
        for (long j = j0; j <= j1; ++j) {
            double x = static_cast<double>(j) * half_pi / t;
            if (x > p + kTiny && x < q - kTiny) xs.push_back(x);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::abs(a - b) <= kTiny; }),
             xs.end());

    // Four subsamples per gap track |sin| between its kinks and extrema.
    std::vector<double> fine;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        for (int s = 0; s < 4; ++s)
            fine.push_back(xs[i - 1] + (xs[i] - xs[i - 1]) * static_cast<double>(s) / 4.0);
    }
    fine.push_back(xs.back());

    Polyline out;
    out.reserve(fine.size());
    for (double x : fine) {
        double bump = (2.0 / k - std::abs(std::sin(t * x)) / k) * trapezoid_ramp(x, p, q, lam);
        out.push_back(Point{x, value_on(h_slice, x) + bump});
    }
    out.front().y = h_slice.front().y;  // eta vanishes at the panel ends
    out.back().y = h_slice.back().y;
    return out;
}

Polyline wriggle_panel(const Polyline& h_slice, double p, double q, int k, double r,
                       double ell) {
    double target = r * polyline_length(h_slice);

    // The ramp alone already lengthens the graph; when the panel is short the
    // amplitude index must outpace the target before a frequency can be
    // solved for, exactly as the diagonal choice of a finer inner index.
    double J = static_cast<double>(k);
    double lam = std::min((q - p) / 3.0, 1.0 / std::sqrt(J));
    auto f = [&](double t) { return polyline_length(build_panel(h_slice, p, q, lam, t, J)); };
    int guard = 0;
    while (f(0.0) >= target) {
        J *= 2.0;
        lam = std::min((q - p) / 3.0, 1.0 / std::sqrt(J));
        if (++guard > 40) fail("BracketNotFound", "amplitude scan exhausted; r too close to 1");
    }

    double t_lo = 0.0;
    double t_hi = std::max(4.0 * J * ell, 2.0 * M_PI / (q - p));
    guard = 0;
    while (f(t_hi) < target) {
        t_lo = t_hi;
        t_hi *= 2.0;
        if (++guard > 40) fail("BracketNotFound", "frequency scan exhausted");
    }
    for (int it = 0; it < 200; ++it) {
        double tm = 0.5 * (t_lo + t_hi);
        double val = f(tm);
        if (std::abs(val - target) <= 1e-10) {
            t_lo = t_hi = tm;
            break;
        }
        (val < target ? t_lo : t_hi) = tm;
        if (t_hi - t_lo <= 1e-15 * std::max(1.0, t_hi)) break;
    }
    return build_panel(h_slice, p, q, lam, 0.5 * (t_lo + t_hi), J);
}

Polyline wriggle_polyline(const Polyline& graph, double alpha, double beta, double r, int k) {
    double ell = 0.0;
    for (std::size_t i = 1; i < graph.size(); ++i) {
        double dx = graph[i].x - graph[i - 1].x;
        if (dx > kTiny) ell = std::max(ell, std::abs((graph[i].y - graph[i - 1].y) / dx));
    }
    Polyline out;
    for (int i = 0; i < k; ++i) {
        double p = alpha + (beta - alpha) * static_cast<double>(i) / k;
        double q = alpha + (beta - alpha) * static_cast<double>(i + 1) / k;
        Polyline panel = wriggle_panel(slice(graph, p, q), p, q, k, r, ell);
        for (std::size_t j = (i == 0 ? 0 : 1); j < panel.size(); ++j) out.push_back(panel[j]);
    }
    dedupe(out);
    return out;
}

}  // namespace

Profile wriggle(const Profile& h, double r, int k) {
    if (r < 1.0) fail("NegativeArgument", "wriggle needs r >= 1");
    if (k < 1) fail("NonPositiveEps", "wriggle needs k >= 1");
    if (!h.is_lipschitz()) fail("NonRegularProfile", "wriggle needs a Lipschitz profile");
    if (r == 1.0) return h;
    Polyline graph = h.graph_polyline();
    return profile_from_polyline(h.a(), h.b(), wriggle_polyline(graph, h.a(), h.b(), r, k));
}

// --------------------------------------------------------------- transport --

namespace {

struct CellKey {
    long i, j;
    bool operator<(const CellKey& o) const { return i < o.i || (i == o.i && j < o.j); }
    bool operator==(const CellKey& o) const { return i == o.i && j == o.j; }
};

// -1: outside all strips; otherwise 2*strip + (0 left | 1 right).
int strip_slot(double x, const std::vector<CutStrip>& strips) {
    for (std::size_t s = 0; s < strips.size(); ++s) {
        if (x >= strips[s].c - strips[s].half_width && x <= strips[s].c)
            return static_cast<int>(2 * s);
        if (x > strips[s].c && x <= strips[s].c + strips[s].half_width)
            return static_cast<int>(2 * s + 1);
    }
    return -1;
}

void split_leg_at_xs(const Point& p0, const Point& p1, const std::vector<double>& cuts_x,
                     std::vector<Point>& out) {
    std::vector<double> ts{0.0, 1.0};
    if (p1.x - p0.x > kTiny)
        for (double cx : cuts_x) {
            double t = (cx - p0.x) / (p1.x - p0.x);
            if (t > 1e-12 && t < 1.0 - 1e-12) ts.push_back(t);
        }
    std::sort(ts.begin(), ts.end());
    for (double t : ts) out.push_back(Point{p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)});
}

}  // namespace

AdatomMeasure transport_density(const AdatomMeasure& target_gc, const LipschitzApprox& approx,
                                const GridSpec& grid, double m, const EnvelopeTable& env,
                                double* r_fix_out) {
    if (!target_gc.atoms().empty())
        fail("CellMismatch", "transport needs a projected (atom-free) target measure");

    std::vector<double> strip_xs;
    for (const CutStrip& s : approx.strips) {
        strip_xs.push_back(s.c - s.half_width);
        strip_xs.push_back(s.c);
        strip_xs.push_back(s.c + s.half_width);
        // The strip must sit inside one cell column for the cell bookkeeping
        // to mirror the target cut column.
        if (grid.cell_x(s.c - s.half_width + 1e-13) != grid.cell_x(s.c + s.half_width - 1e-13))
            fail("CellMismatch", "strip straddles a cell column; increase k");
    }

    // Target aggregates per cell: regular+jump mass/length outside strips,
    // cut mass/length per strip. Mass that has no matching portion on the
    // approximating graph is folded into the additive remainder.
    struct Target {
        KahanSum tilde_mass_out, tilde_len_out;
        KahanSum cut_mass, cut_len;
        double total_len = 0.0;
    };
    std::map<CellKey, Target> target;
    KahanSum folded;

    const auto& tsegs = target_gc.graph().segments();
    for (std::size_t si = 0; si < tsegs.size(); ++si) {
        double u = target_gc.density()[si];
        for (std::size_t leg = 1; leg < tsegs[si].pts.size(); ++leg) {
            std::vector<Point> pts;
            split_leg_at_xs(tsegs[si].pts[leg - 1], tsegs[si].pts[leg], strip_xs, pts);
            for (std::size_t j = 1; j < pts.size(); ++j) {
                double len = dist(pts[j - 1], pts[j]);
                if (len <= kTiny) continue;
                Point mid{0.5 * (pts[j - 1].x + pts[j].x), 0.5 * (pts[j - 1].y + pts[j].y)};
                CellKey key{grid.cell_x(mid.x), grid.cell_y(mid.y)};
                Target& tg = target[key];
                tg.total_len += len;
                if (tsegs[si].kind == SegmentKind::Cut) {
                    if (strip_slot(mid.x, approx.strips) >= 0) {
                        tg.cut_mass.add(u * len);
                        tg.cut_len.add(len);
                    } else {
                        folded.add(u * len);  // shallow cut without a strip
                    }
                } else if (strip_slot(mid.x, approx.strips) < 0) {
                    tg.tilde_mass_out.add(u * len);
                    tg.tilde_len_out.add(len);
                } else {
                    folded.add(u * len);  // graph material inside a strip
                }
            }
        }
    }

    // Approximating graph, split at strip boundaries and grid lines.
    Polyline g = approx.profile.graph_polyline();
    Polyline gsplit;
    for (std::size_t i = 1; i < g.size(); ++i) {
        std::vector<Point> pts;
        split_leg_at_xs(g[i - 1], g[i], strip_xs, pts);
        for (std::size_t j = (i == 1 ? 0 : 1); j < pts.size(); ++j) gsplit.push_back(pts[j]);
    }
    ExtendedGraph base({GraphSegment{SegmentKind::Regular, gsplit, 0.0}});
    if (!grid_admissible_for(base, grid))
        fail("CellMismatch", "grid not admissible for the approximating graph");
    auto refined = std::make_shared<ExtendedGraph>(refine_at_grid(base, grid));

    struct Approx {
        double len_out = 0.0;
        std::map<int, double> len_slot;  // strip halves
        double total_len = 0.0;
    };
    std::map<CellKey, Approx> ap;
    const auto& asegs = refined->segments();
    std::vector<CellKey> piece_cell(asegs.size());
    std::vector<int> piece_slot(asegs.size());
    for (std::size_t i = 0; i < asegs.size(); ++i) {
        Point mid{0.5 * (asegs[i].pts.front().x + asegs[i].pts.back().x),
                  0.5 * (asegs[i].pts.front().y + asegs[i].pts.back().y)};
        CellKey key{grid.cell_x(mid.x), grid.cell_y(mid.y)};
        int slot = strip_slot(mid.x, approx.strips);
        piece_cell[i] = key;
        piece_slot[i] = slot;
        Approx& ag = ap[key];
        ag.total_len += asegs[i].length;
        if (slot < 0)
            ag.len_out += asegs[i].length;
        else
            ag.len_slot[slot] += asegs[i].length;
    }

    // Proximity regime: both graphs must meet exactly the same cells.
    for (const auto& [key, tg] : target)
        if (tg.total_len > 1e-12 && (ap.find(key) == ap.end() || ap[key].total_len <= 1e-12))
            fail("CellMismatch", "target meets a cell the approximation misses");
    for (const auto& [key, ag] : ap)
        if (ag.total_len > 1e-12 && (target.find(key) == target.end() ||
                                     target.at(key).total_len <= 1e-12))
            fail("CellMismatch", "approximation meets a cell the target misses");

    // Per-cell masses for each approx portion.
    struct PortionMass {
        double out = 0.0;
        std::map<int, double> slot;
    };
    std::map<CellKey, PortionMass> masses;
    for (auto& [key, tg] : target) {
        PortionMass& pm = masses[key];
        const Approx& ag = ap.at(key);
        double tmo = tg.tilde_mass_out.value();
        if (tmo > 0.0) {
            if (ag.len_out > kTiny)
                pm.out = tmo;
            else
                folded.add(tmo);
        }
        double cmass = tg.cut_mass.value();
        double clen = tg.cut_len.value();
        if (cmass > 0.0 || clen > kTiny) {
            double uc = clen > kTiny ? cmass / clen : 0.0;
            auto [ca, cb] = cut_split(uc, env);
            // The strip this cut column belongs to.
            int s = -1;
            for (std::size_t si = 0; si < approx.strips.size(); ++si) {
                long col = grid.cell_x(approx.strips[si].c);
                if (col == key.i) s = static_cast<int>(si);
            }
            if (s < 0) {
                folded.add(cmass);
            } else {
                double left = ca * clen, right = cb * clen;
                auto itl = ag.len_slot.find(2 * s);
                auto itr = ag.len_slot.find(2 * s + 1);
                if (itl != ag.len_slot.end() && itl->second > kTiny)
                    pm.slot[2 * s] += left;
                else
                    folded.add(left);
                if (itr != ag.len_slot.end() && itr->second > kTiny)
                    pm.slot[2 * s + 1] += right;
                else
                    folded.add(right);
            }
        }
    }

    std::vector<double> density(asegs.size(), 0.0);
    for (std::size_t i = 0; i < asegs.size(); ++i) {
        auto it = masses.find(piece_cell[i]);
        if (it == masses.end()) continue;
        const Approx& ag = ap.at(piece_cell[i]);
        if (piece_slot[i] < 0) {
            if (ag.len_out > kTiny) density[i] = it->second.out / ag.len_out;
        } else {
            auto ms = it->second.slot.find(piece_slot[i]);
            if (ms != it->second.slot.end()) density[i] = ms->second / ag.len_slot.at(piece_slot[i]);
        }
    }

    // Additive remainder: total mass becomes exactly m.
    double total_len = refined->lengths().total;
    KahanSum assigned;
    for (std::size_t i = 0; i < asegs.size(); ++i) assigned.add(density[i] * asegs[i].length);
    double r_fix = (m - assigned.value()) / total_len;
    if (r_fix_out) *r_fix_out = r_fix;
    for (double& u : density) {
        u += r_fix;
        if (u < -1e-12) fail("ConstraintRepairFailed", "transport produced a negative density");
        u = std::max(u, 0.0);
    }
    KahanSum mass2;
    for (std::size_t i = 0; i < asegs.size(); ++i) mass2.add(density[i] * asegs[i].length);
    if (mass2.value() > 0.0) {
        double scale = m / mass2.value();
        for (double& u : density) u *= scale;
    }
    return AdatomMeasure(refined, std::move(density), {});
}

// ---------------------------------------------------------------- pipeline --

const char* to_string(RecoveryStageTag tag) {
    switch (tag) {
        case RecoveryStageTag::GridConstant: return "grid_constant";
        case RecoveryStageTag::FiniteCuts: return "finite_cuts";
        case RecoveryStageTag::LipschitzApprox: return "lipschitz";
        case RecoveryStageTag::Wriggled: return "wriggled";
        case RecoveryStageTag::ConstraintFixed: return "constraint_fixed";
    }
    return "?";
}

namespace {

PiecewiseDensity measure_to_piecewise(const AdatomMeasure& mu) {
    PiecewiseDensity d;
    const auto& segs = mu.graph().segments();
    d.xs.push_back(segs.front().pts.front().x);
    for (std::size_t i = 0; i < segs.size(); ++i) {
        double u = mu.density()[i];
        if (!d.values.empty() && u == d.values.back()) {
            d.xs.back() = segs[i].pts.back().x;
            continue;
        }
        d.values.push_back(u);
        d.xs.push_back(segs[i].pts.back().x);
    }
    return d;
}

StageRow make_row(int k, RecoveryStageTag tag, const Profile& prof, const AdatomMeasure& mu,
                  const SurfaceDensity& psi, const EnvelopeTable& env, bool lipschitz_F) {
    StageRow row;
    row.k = k;
    row.stage = tag;
    row.area = area_above_zero(prof);
    row.mass = total_mass(mu);
    GraphLengths L = decompose(prof).lengths();
    row.h1_regular = L.regular;
    row.h1_jump = L.jump;
    row.h1_cut = L.cut;
    EnergyBreakdown G = surface_energy_relaxed(mu, env);
    row.G_surface = G.total;
    if (lipschitz_F) {
        KahanSum F;
        const auto& segs = mu.graph().segments();
        for (std::size_t i = 0; i < segs.size(); ++i)
            F.add(psi(mu.density()[i]) * segs[i].length);
        row.F_surface = F.value();
    }
    return row;
}

}  // namespace

RecoveryResult build_recovery_sequence(const Profile& p, const AdatomMeasure& mu, double m,
                                       double M, const std::vector<int>& ks,
                                       const SurfaceDensity& psi, const EnvelopeTable& env,
                                       double cell, const RecoveryOptions& opts) {
    if (ks.empty()) fail("EmptySequence", "need at least one k");
    if (std::abs(total_mass(mu) - m) > 1e-9 * std::max(1.0, m))
        fail("ConstraintRepairFailed", "mu does not carry total mass m");
    if (std::abs(area_above_zero(p) - M) > 1e-9 * std::max(1.0, M))
        fail("ConstraintRepairFailed", "profile does not enclose area M");

    RecoveryResult res;
    res.ks = ks;

    ExtendedGraph target_graph = decompose(p);
    res.grid = admissible_grid(target_graph, cell, opts.grid_max_tries);
    const GridSpec grid_spec = res.grid;
    AdatomMeasure mu_gc = grid_constant_projection(target_graph, mu, grid_spec);
    const double s0 = env.s0();

    BoundingBox box = target_graph.bbox();
    box.absorb(Point{p.a(), 0.0});
    box.absorb(Point{p.b(), p.max_height() + 1.0});
    double padx = std::max(0.3, 0.25 * box.width());
    double pady = std::max(0.3, 0.25 * box.height());
    box.xmin -= padx;
    box.xmax += padx;
    box.ymin -= pady;
    box.ymax += pady;
    TestFunctionBank bank = default_bank(box, cell);

    auto add_gaps = [&](StageRow& row, const Profile& prof, const AdatomMeasure& stage_mu) {
        if (!opts.stage_gaps) return;
        row.hausdorff_gap =
            hausdorff_complement_distance(prof, p, box, opts.hausdorff_n).distance;
        row.weakstar_gap = weak_star_gap(stage_mu, mu, bank);
    };

    // Probe the smallest k for the multiplier its approximation needs; used
    // as the common starting point so that k_eff grows proportionally to k.
    int base_mult = 1;
    {
        int k_min = *std::min_element(ks.begin(), ks.end());
        for (; base_mult <= 1024; base_mult *= 2) {
            try {
                Profile g_eff = finite_cut_reduction(p, k_min * base_mult, M);
                LipschitzApprox probe = lipschitz_approximation(g_eff, k_min * base_mult);
                double eps = (M - area_above_zero(probe.profile)) / (p.b() - p.a());
                transport_density(mu_gc, probe.shifted_y(eps), grid_spec, m, env);
                break;
            } catch (const Error& e) {
                if (e.code() != "CellMismatch" && e.code() != "StripsOverlap") throw;
            }
        }
        if (base_mult > 1024)
            fail("CellMismatch", "no usable approximation at the smallest k");
    }

    struct PerK {
        std::vector<StageRow> rows;
        RegularConfiguration config;
        double eps_k = 0.0, gamma_k = 1.0, t_k = 1.0, r_fix = 0.0;
    };

    auto run_one = [&](int k) -> PerK {
        PerK result;
        auto& out_rows = result.rows;
        // Stage 1: grid-constant density on the target graph.
        {
            StageRow row = make_row(k, RecoveryStageTag::GridConstant, p, mu_gc, psi, env,
                                    p.is_lipschitz());
            add_gaps(row, p, mu_gc);
            out_rows.push_back(row);
        }

        // Stage 2: finitely many cuts, area restored by the uniform lift.
        Profile g_k = finite_cut_reduction(p, k, M);
        {
            StageRow row =
                make_row(k, RecoveryStageTag::FiniteCuts, g_k, mu_gc, psi, env, false);
            add_gaps(row, g_k, mu_gc);
            out_rows.push_back(row);
        }

        // Stage 3: slope-limited approximation + cell transport. The grid
        // regime (same cells met) can fail for small k; retry with a finer
        // inner index, the same refinement the diagonal argument performs.
        // The shared starting multiplier keeps the inner index proportional
        // to k across the sequence, so the geometry gaps stay monotone.
        LipschitzApprox la;
        AdatomMeasure transported;
        double eps_k = 0.0;
        bool ok = false;
        std::string last_err;
        for (int mult = base_mult; mult <= 1024 && !ok; mult *= 2) {
            try {
                Profile g_eff = mult == 1 ? g_k : finite_cut_reduction(p, k * mult, M);
                la = lipschitz_approximation(g_eff, k * mult);
                eps_k = (M - area_above_zero(la.profile)) / (p.b() - p.a());
                la = la.shifted_y(eps_k);
                transported = transport_density(mu_gc, la, grid_spec, m, env, &result.r_fix);
                ok = true;
            } catch (const Error& e) {
                if (e.code() != "CellMismatch" && e.code() != "StripsOverlap") throw;
                last_err = e.what();
            }
        }
        if (!ok) fail("CellMismatch", "no usable approximation at k=" + std::to_string(k) +
                                          " (" + last_err + ")");
        result.eps_k = eps_k;
        {
            StageRow row = make_row(k, RecoveryStageTag::LipschitzApprox, la.profile,
                                    transported, psi, env, true);
            add_gaps(row, la.profile, transported);
            out_rows.push_back(row);
        }

        // Stage 4: wriggle every interval whose density exceeds the envelope
        // threshold; the replacement density keeps the interval mass exact.
        PiecewiseDensity pw = measure_to_piecewise(transported);
        Polyline graph = la.profile.graph_polyline();
        Polyline wriggled;
        std::vector<double> new_values(pw.values.size());
        for (std::size_t i = 0; i < pw.values.size(); ++i) {
            double x0 = pw.xs[i], x1 = pw.xs[i + 1];
            Polyline part = slice(graph, x0, x1);
            double u = pw.values[i];
            if (!std::isinf(s0) && u > s0 * (1.0 + 1e-6)) {
                double r = u / s0;
                double len_before = polyline_length(part);
                part = wriggle_polyline(part, x0, x1, r, k);
                double len_after = polyline_length(part);
                new_values[i] = u * len_before / len_after;  // = s0 up to the 1e-10 length solve
            } else {
                new_values[i] = u;
            }
            for (std::size_t j = (wriggled.empty() ? 0 : 1); j < part.size(); ++j)
                wriggled.push_back(part[j]);
        }
        Profile barh = profile_from_polyline(p.a(), p.b(), wriggled);
        RegularConfiguration bar_cfg{barh, PiecewiseDensity{pw.xs, new_values}, {}, {}};
        {
            StageRow row = make_row(k, RecoveryStageTag::Wriggled, barh, bar_cfg.as_measure(),
                                    psi, env, true);
            add_gaps(row, barh, bar_cfg.as_measure());
            out_rows.push_back(row);
        }

        // Stage 5: multiplicative area fix, then the per-interval length
        // ratio restores the mass.
        double area_bar = area_above_zero(barh);
        double gamma = M / area_bar;
        if (!(gamma > 0.0) || gamma > 1.0 + 1e-9)
            fail("ConstraintRepairFailed", "gamma outside (0,1]");
        Profile hk = barh.scaled_y(gamma);
        double gamma2 = M / area_above_zero(hk);
        hk = hk.scaled_y(gamma2);
        gamma *= gamma2;

        Polyline bar_graph = barh.graph_polyline();
        Polyline hk_graph = hk.graph_polyline();
        double t_global = polyline_length(hk_graph) / polyline_length(bar_graph);
        if (!(t_global > 0.0) || t_global > 1.0 + 1e-9)
            fail("ConstraintRepairFailed", "t outside (0,1]");
        std::vector<double> fixed(new_values.size());
        for (std::size_t i = 0; i < new_values.size(); ++i) {
            double lb = detail::clipped_polyline_length(bar_graph, pw.xs[i], pw.xs[i + 1]);
            double lf = detail::clipped_polyline_length(hk_graph, pw.xs[i], pw.xs[i + 1]);
            fixed[i] = lf > kTiny ? new_values[i] * lb / lf : new_values[i];
        }
        RegularConfiguration cfg{hk, PiecewiseDensity{pw.xs, fixed}, {}, {}};
        double mass_now = total_mass(cfg.as_measure());
        if (mass_now > 0.0) {
            double scale = m / mass_now;
            for (double& u : cfg.density.values) u *= scale;
        }
        result.gamma_k = gamma;
        result.t_k = t_global;
        {
            StageRow row = make_row(k, RecoveryStageTag::ConstraintFixed, hk, cfg.as_measure(),
                                    psi, env, true);
            add_gaps(row, hk, cfg.as_measure());
            out_rows.push_back(row);
        }
        result.config = std::move(cfg);
        return result;
    };

    std::vector<PerK> slots(ks.size());
    if (opts.threads > 1 && ks.size() > 1) {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(ks.size());
        std::atomic<std::size_t> next{0};
        int nthreads = std::min<std::size_t>(opts.threads, ks.size());
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < ks.size(); i = next.fetch_add(1)) {
                    try {
                        slots[i] = run_one(ks[i]);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (std::thread& th : pool) th.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (std::size_t i = 0; i < ks.size(); ++i) slots[i] = run_one(ks[i]);
    }
    for (PerK& slot : slots) {
        for (StageRow& row : slot.rows) res.rows.push_back(row);
        res.configs.push_back(std::move(slot.config));
        res.eps_k.push_back(slot.eps_k);
        res.gamma_k.push_back(slot.gamma_k);
        res.t_k.push_back(slot.t_k);
        res.r_fix_k.push_back(slot.r_fix);
    }
    return res;
}

}  // namespace epirelax
