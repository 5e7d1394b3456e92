#pragma once

#include <optional>
#include <vector>

#include "epirelax/common.hpp"

namespace epirelax {

// Film profiles are piecewise-linear BV functions h >= 0 on (a,b). Arcs are
// polylines on the open subintervals between breakpoints; each interior
// breakpoint stores the one-sided limits and the point value of the lower
// semi-continuous representative. Jumps (left != right) and cuts
// (value < min(left,right)) can occur only at breakpoints. The polyline
// restriction keeps every length and area closed-form; approximating a
// general BV function means refining breakpoints, which is the caller's job.

struct ProfileNode {
    double x = 0.0;
    double left = 0.0;   // h(x-)
    double right = 0.0;  // h(x+)
    double value = 0.0;  // h(x), <= min(left, right)
};

struct ProfileSpec {
    double a = 0.0;
    double b = 1.0;
    std::vector<Polyline> arcs;       // arc i spans (x_i, x_{i+1})
    std::vector<ProfileNode> nodes;   // optional; matched to interior breakpoints by x
};

class Profile {
public:
    Profile() = default;

    double a() const { return a_; }
    double b() const { return b_; }
    const std::vector<double>& breakpoints() const { return xs_; }
    const std::vector<Polyline>& arcs() const { return arcs_; }
    const std::vector<ProfileNode>& nodes() const { return nodes_; }

    /// Pointwise value of the lsc representative (point value at breakpoints).
    double value(double x) const;
    double left_limit_at(double x) const;
    double right_limit_at(double x) const;

    double total_variation() const;
    double max_abs_slope() const;
    double max_height() const;
    double min_height() const;

    /// True when there is no jump and no cut at any interior breakpoint.
    bool is_lipschitz(double tol = 1e-12) const;

    /// Continuous graph as one polyline; only valid for Lipschitz profiles.
    Polyline graph_polyline() const;

    Profile shifted_y(double c) const;   // h + c, requires min(h)+c >= 0
    Profile scaled_y(double g) const;    // g*h, requires g >= 0

    friend Profile build_profile(const ProfileSpec& spec);

private:
    double a_ = 0.0, b_ = 1.0;
    std::vector<double> xs_;
    std::vector<Polyline> arcs_;
    std::vector<ProfileNode> nodes_;  // one per interior breakpoint

    std::size_t arc_index(double x) const;
};

enum class SegmentKind { Regular, Jump, Cut };

struct GraphSegment {
    SegmentKind kind = SegmentKind::Regular;
    Polyline pts;  // polyline for Regular, bottom->top pair for Jump/Cut
    double length = 0.0;
};

struct GraphLengths {
    double regular = 0.0;
    double jump = 0.0;
    double cut = 0.0;
    double total = 0.0;
};

/// The extended graph of a profile: graph arcs plus the vertical jump and cut
/// segments. Segments overlap only at endpoints; the half-open conventions of
/// the defining sets carry no length and are not stored.
class ExtendedGraph {
public:
    ExtendedGraph() = default;
    explicit ExtendedGraph(std::vector<GraphSegment> segments);

    const std::vector<GraphSegment>& segments() const { return segments_; }
    const GraphLengths& lengths() const { return lengths_; }
    const BoundingBox& bbox() const { return bbox_; }

    /// Indices of segments of one kind, in storage order.
    std::vector<std::size_t> indices_of(SegmentKind kind) const;

private:
    std::vector<GraphSegment> segments_;
    GraphLengths lengths_;
    BoundingBox bbox_;
};

Profile build_profile(const ProfileSpec& spec);

ExtendedGraph decompose(const Profile& p);

/// Exact closed-form lengths, optionally restricted to an x-window (closed;
/// vertical segments count when their abscissa lies in the window).
GraphLengths graph_lengths(const ExtendedGraph& g,
                           std::optional<std::pair<double, double>> window = std::nullopt);

/// L2 measure of the film above the substrate: integral of h over (a,b).
double area_above_zero(const Profile& p);

/// Sorted abscissae of cuts with depth h(x-) - h(x) >= eps.
std::vector<double> cuts_exceeding(const Profile& p, double eps);

namespace detail {
/// Window of the domain only; throws WindowOutOfDomain otherwise.
void check_window(double a, double b, double w0, double w1);
/// Length of a polyline clipped to [w0, w1] in x (x must be non-decreasing).
double clipped_polyline_length(const Polyline& pts, double w0, double w1);
}  // namespace detail

}  // namespace epirelax
