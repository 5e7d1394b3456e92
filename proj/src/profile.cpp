#include "epirelax/profile.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace epirelax {

namespace {

constexpr double kMatchTol = 1e-12;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Profile build_profile(const ProfileSpec& spec) {
    if (!(spec.a < spec.b)) fail("EmptyDomain", "domain requires a < b");
    if (spec.arcs.empty()) fail("EmptyDomain", "profile needs at least one arc");

    Profile p;
    p.a_ = spec.a;
    p.b_ = spec.b;
    p.arcs_ = spec.arcs;

    // Breakpoints are the arc endpoints; arcs must tile (a,b) in order.
    p.xs_.push_back(spec.a);
    for (std::size_t i = 0; i < spec.arcs.size(); ++i) {
        const Polyline& arc = spec.arcs[i];
        if (arc.size() < 2) fail("EmptyDomain", "arc " + std::to_string(i) + " has fewer than 2 samples");
        if (std::abs(arc.front().x - p.xs_.back()) > kMatchTol)
            fail("NonMonotoneBreakpoints",
                 "arc " + std::to_string(i) + " starts at " + fmt(arc.front().x) +
                     ", expected " + fmt(p.xs_.back()));
        for (std::size_t j = 1; j < arc.size(); ++j)
            if (!(arc[j].x > arc[j - 1].x))
                fail("NonMonotoneBreakpoints", "arc " + std::to_string(i) + " x-samples not increasing");
        for (const Point& q : arc)
            if (q.y < 0.0) fail("NegativeHeight", "arc sample below zero at x=" + fmt(q.x));
        p.xs_.push_back(arc.back().x);
    }
    if (std::abs(p.xs_.back() - spec.b) > kMatchTol)
        fail("NonMonotoneBreakpoints", "arcs end at " + fmt(p.xs_.back()) + ", domain ends at " + fmt(spec.b));
    p.xs_.back() = spec.b;

    // Interior breakpoints: default node data is the continuous/lsc choice,
    // value = min of the adjacent arc endpoint values.
    const std::size_t n_interior = p.arcs_.size() - 1;
    p.nodes_.resize(n_interior);
    for (std::size_t i = 0; i < n_interior; ++i) {
        double l = p.arcs_[i].back().y;
        double r = p.arcs_[i + 1].front().y;
        p.nodes_[i] = ProfileNode{p.xs_[i + 1], l, r, std::min(l, r)};
    }
    for (const ProfileNode& nd : spec.nodes) {
        std::size_t i = 0;
        for (; i < n_interior; ++i)
            if (std::abs(nd.x - p.xs_[i + 1]) <= kMatchTol) break;
        if (i == n_interior)
            fail("NonMonotoneBreakpoints", "node x=" + fmt(nd.x) + " is not an interior breakpoint");
        double l = p.arcs_[i].back().y;
        double r = p.arcs_[i + 1].front().y;
        if (std::abs(nd.left - l) > kMatchTol || std::abs(nd.right - r) > kMatchTol)
            fail("NotLowerSemicontinuous",
                 "node limits at x=" + fmt(nd.x) + " disagree with adjacent arc endpoints");
        if (nd.value < 0.0) fail("NegativeHeight", "node value below zero at x=" + fmt(nd.x));
        if (nd.value > std::min(l, r) + kMatchTol)
            fail("NotLowerSemicontinuous",
                 "point value " + fmt(nd.value) + " exceeds min of one-sided limits at x=" + fmt(nd.x));
        p.nodes_[i] = ProfileNode{p.xs_[i + 1], l, r, std::min(nd.value, std::min(l, r))};
    }
    return p;
}

std::size_t Profile::arc_index(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = (it == xs_.begin()) ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
    return std::min(i, arcs_.size() - 1);
}

double Profile::value(double x) const {
    if (x <= xs_.front()) return arcs_.front().front().y;
    if (x >= xs_.back()) return arcs_.back().back().y;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (std::abs(x - nodes_[i].x) <= kMatchTol) return nodes_[i].value;
    const Polyline& arc = arcs_[arc_index(x)];
    auto it = std::upper_bound(arc.begin(), arc.end(), x,
                               [](double v, const Point& q) { return v < q.x; });
    std::size_t j = static_cast<std::size_t>(it - arc.begin());
    if (j == 0) return arc.front().y;
    if (j == arc.size()) return arc.back().y;
    const Point& p0 = arc[j - 1];
    const Point& p1 = arc[j];
    double t = (x - p0.x) / (p1.x - p0.x);
    return p0.y + t * (p1.y - p0.y);
}

double Profile::left_limit_at(double x) const {
    for (const ProfileNode& nd : nodes_)
        if (std::abs(x - nd.x) <= kMatchTol) return nd.left;
    return value(x);
}

double Profile::right_limit_at(double x) const {
    for (const ProfileNode& nd : nodes_)
        if (std::abs(x - nd.x) <= kMatchTol) return nd.right;
    return value(x);
}

double Profile::total_variation() const {
    KahanSum s;
    for (const Polyline& arc : arcs_)
        for (std::size_t j = 1; j < arc.size(); ++j) s.add(std::abs(arc[j].y - arc[j - 1].y));
    // Crossing a breakpoint contributes |left - value| + |right - value|.
    for (const ProfileNode& nd : nodes_) {
        s.add(nd.left - nd.value);
        s.add(nd.right - nd.value);
    }
    return s.value();
}

double Profile::max_abs_slope() const {
    double m = 0.0;
    for (const Polyline& arc : arcs_)
        for (std::size_t j = 1; j < arc.size(); ++j) {
            double dx = arc[j].x - arc[j - 1].x;
            if (dx > 0.0) m = std::max(m, std::abs((arc[j].y - arc[j - 1].y) / dx));
        }
    return m;
}

double Profile::max_height() const {
    double m = -kInf;
    for (const Polyline& arc : arcs_)
        for (const Point& q : arc) m = std::max(m, q.y);
    for (const ProfileNode& nd : nodes_) m = std::max(m, std::max(nd.left, nd.right));
    return m;
}

double Profile::min_height() const {
    double m = kInf;
    for (const Polyline& arc : arcs_)
        for (const Point& q : arc) m = std::min(m, q.y);
    for (const ProfileNode& nd : nodes_) m = std::min(m, nd.value);
    return m;
}

bool Profile::is_lipschitz(double tol) const {
    for (const ProfileNode& nd : nodes_) {
        if (std::abs(nd.left - nd.right) > tol) return false;
        if (std::min(nd.left, nd.right) - nd.value > tol) return false;
    }
    return true;
}

Polyline Profile::graph_polyline() const {
    Polyline out;
    for (const Polyline& arc : arcs_) {
        for (const Point& q : arc) {
            if (!out.empty() && std::abs(out.back().x - q.x) <= kMatchTol &&
                std::abs(out.back().y - q.y) <= kMatchTol)
                continue;
            out.push_back(q);
        }
    }
    return out;
}

Profile Profile::shifted_y(double c) const {
    if (min_height() + c < -1e-12) fail("NegativeHeight", "shift would push profile below zero");
    Profile q(*this);
    for (Polyline& arc : q.arcs_)
        for (Point& pt : arc) pt.y = std::max(0.0, pt.y + c);
    for (ProfileNode& nd : q.nodes_) {
        nd.left = std::max(0.0, nd.left + c);
        nd.right = std::max(0.0, nd.right + c);
        nd.value = std::max(0.0, nd.value + c);
    }
    return q;
}

Profile Profile::scaled_y(double g) const {
    if (g < 0.0) fail("NegativeHeight", "negative vertical scale");
    Profile q(*this);
    for (Polyline& arc : q.arcs_)
        for (Point& pt : arc) pt.y *= g;
    for (ProfileNode& nd : q.nodes_) {
        nd.left *= g;
        nd.right *= g;
        nd.value *= g;
    }
    return q;
}

ExtendedGraph::ExtendedGraph(std::vector<GraphSegment> segments) : segments_(std::move(segments)) {
    KahanSum lr, lj, lc;
    for (GraphSegment& s : segments_) {
        s.length = polyline_length(s.pts);
        switch (s.kind) {
            case SegmentKind::Regular: lr.add(s.length); break;
            case SegmentKind::Jump: lj.add(s.length); break;
            case SegmentKind::Cut: lc.add(s.length); break;
        }
        for (const Point& q : s.pts) bbox_.absorb(q);
    }
    lengths_.regular = lr.value();
    lengths_.jump = lj.value();
    lengths_.cut = lc.value();
    lengths_.total = lengths_.regular + lengths_.jump + lengths_.cut;
}

std::vector<std::size_t> ExtendedGraph::indices_of(SegmentKind kind) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < segments_.size(); ++i)
        if (segments_[i].kind == kind) out.push_back(i);
    return out;
}

ExtendedGraph decompose(const Profile& p) {
    std::vector<GraphSegment> segs;
    for (const Polyline& arc : p.arcs())
        segs.push_back(GraphSegment{SegmentKind::Regular, arc, 0.0});
    for (const ProfileNode& nd : p.nodes()) {
        double lo = std::min(nd.left, nd.right);
        double hi = std::max(nd.left, nd.right);
        if (lo - nd.value > 0.0)
            segs.push_back(GraphSegment{SegmentKind::Cut,
                                        {Point{nd.x, nd.value}, Point{nd.x, lo}}, 0.0});
        if (hi - lo > 0.0)
            segs.push_back(GraphSegment{SegmentKind::Jump,
                                        {Point{nd.x, lo}, Point{nd.x, hi}}, 0.0});
    }
    return ExtendedGraph(std::move(segs));
}

namespace detail {

void check_window(double a, double b, double w0, double w1) {
    if (w0 > w1 || w0 < a - 1e-12 || w1 > b + 1e-12)
        fail("WindowOutOfDomain",
             "window [" + fmt(w0) + ", " + fmt(w1) + "] not inside [" + fmt(a) + ", " + fmt(b) + "]");
}

double clipped_polyline_length(const Polyline& pts, double w0, double w1) {
    KahanSum s;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Point& p0 = pts[i - 1];
        const Point& p1 = pts[i];
        double x0 = std::max(p0.x, w0);
        double x1 = std::min(p1.x, w1);
        if (x1 <= x0) continue;
        double dx = p1.x - p0.x;
        if (dx <= 0.0) continue;
        double frac = (x1 - x0) / dx;
        s.add(std::hypot(x1 - x0, (p1.y - p0.y) * frac));
    }
    return s.value();
}

}  // namespace detail

GraphLengths graph_lengths(const ExtendedGraph& g, std::optional<std::pair<double, double>> window) {
    if (!window) return g.lengths();
    double w0 = window->first;
    double w1 = window->second;
    detail::check_window(g.bbox().xmin, g.bbox().xmax, w0, w1);

    GraphLengths out;
    KahanSum lr, lj, lc;
    for (const GraphSegment& s : g.segments()) {
        if (s.kind == SegmentKind::Regular) {
            lr.add(detail::clipped_polyline_length(s.pts, w0, w1));
        } else {
            double x = s.pts.front().x;
            if (x >= w0 && x <= w1) (s.kind == SegmentKind::Jump ? lj : lc).add(s.length);
        }
    }
    out.regular = lr.value();
    out.jump = lj.value();
    out.cut = lc.value();
    out.total = out.regular + out.jump + out.cut;
    return out;
}

double area_above_zero(const Profile& p) {
    KahanSum s;
    for (const Polyline& arc : p.arcs())
        for (std::size_t j = 1; j < arc.size(); ++j)
            s.add(0.5 * (arc[j].y + arc[j - 1].y) * (arc[j].x - arc[j - 1].x));
    return s.value();
}

std::vector<double> cuts_exceeding(const Profile& p, double eps) {
    if (!(eps > 0.0)) fail("NonPositiveEps", "eps must be > 0");
    std::vector<double> out;
    for (const ProfileNode& nd : p.nodes())
        if (std::min(nd.left, nd.right) - nd.value >= eps) out.push_back(nd.x);
    return out;
}

}  // namespace epirelax
