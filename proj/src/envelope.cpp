#include "epirelax/envelope.hpp"

#include <algorithm>
#include <cassert>

namespace epirelax {

SurfaceDensity SurfaceDensity::constant(double c) {
    if (!(c > 0.0)) fail("NonPositivePsi", "constant density must be > 0");
    SurfaceDensity d;
    d.kind_ = DensityKind::Constant;
    d.alpha_ = c;
    d.tail_ = 0.0;
    return d;
}

SurfaceDensity SurfaceDensity::quadratic(double alpha, double beta) {
    if (!(alpha > 0.0) || beta < 0.0)
        fail("NonPositivePsi", "quadratic density needs alpha > 0, beta >= 0");
    SurfaceDensity d;
    d.kind_ = DensityKind::Quadratic;
    d.alpha_ = alpha;
    d.beta_ = beta;
    d.tail_ = beta > 0.0 ? kInf : 0.0;
    return d;
}

SurfaceDensity SurfaceDensity::table(std::vector<double> grid, std::vector<double> values,
                                     double tail_slope) {
    if (grid.size() < 2 || grid.size() != values.size())
        fail("DegenerateGrid", "table needs >= 2 matched samples");
    if (std::abs(grid.front()) > 1e-12) fail("DegenerateGrid", "table grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) fail("DegenerateGrid", "table grid not increasing");
    double vmin = *std::min_element(values.begin(), values.end());
    if (!(vmin > 0.0)) fail("NonPositivePsi", "table values must be strictly positive");
    if (tail_slope < 0.0)
        fail("NonPositivePsi", "negative tail slope makes inf psi = -inf");
    SurfaceDensity d;
    d.kind_ = DensityKind::SampleTable;
    d.grid_ = std::move(grid);
    d.values_ = std::move(values);
    d.tail_ = tail_slope;
    return d;
}

double SurfaceDensity::operator()(double s) const {
    if (s < 0.0) fail("NegativeArgument", "density argument must be >= 0");
    switch (kind_) {
        case DensityKind::Constant: return alpha_;
        case DensityKind::Quadratic: return alpha_ + beta_ * s * s;
        case DensityKind::SampleTable: {
            if (s >= grid_.back()) return values_.back() + tail_ * (s - grid_.back());
            auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
            std::size_t j = static_cast<std::size_t>(it - grid_.begin());
            if (j == 0) return values_.front();
            double t = (s - grid_[j - 1]) / (grid_[j] - grid_[j - 1]);
            return values_[j - 1] + t * (values_[j] - values_[j - 1]);
        }
    }
    return alpha_;
}

double ConvexPiecewise::operator()(double s) const {
    if (s <= xs.front()) return ys.front();
    if (s >= xs.back()) return ys.back() + final_slope() * (s - xs.back());
    auto it = std::upper_bound(xs.begin(), xs.end(), s);
    std::size_t j = static_cast<std::size_t>(it - xs.begin());
    double t = (s - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

double ConvexPiecewise::final_slope() const {
    std::size_t n = xs.size();
    if (n < 2) return 0.0;
    return (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
}

double ConvexPiecewise::max_abs_slope() const {
    double m = 0.0;
    for (std::size_t j = 1; j < xs.size(); ++j)
        m = std::max(m, std::abs((ys[j] - ys[j - 1]) / (xs[j] - xs[j - 1])));
    return m;
}

namespace {

// Andrew monotone chain, lower hull only. Points arrive sorted in x.
ConvexPiecewise lower_hull(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<std::size_t> h;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        while (h.size() >= 2) {
            std::size_t a = h[h.size() - 2], b = h[h.size() - 1];
            double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if (cross <= 0.0)
                h.pop_back();  // b lies on or above chord a->i
            else
                break;
        }
        h.push_back(i);
    }
    ConvexPiecewise out;
    for (std::size_t i : h) {
        out.xs.push_back(xs[i]);
        out.ys.push_back(ys[i]);
    }
    return out;
}

// Fold the recession ray of psi into the hull: drop trailing hull segments
// steeper than the tail slope so the linear continuation stays convex and is
// the true envelope of (samples + ray).
void wrap_tail(ConvexPiecewise& hull, double tail) {
    if (std::isinf(tail)) return;
    while (hull.xs.size() >= 2 && hull.final_slope() > tail + 1e-15) {
        hull.xs.pop_back();
        hull.ys.pop_back();
    }
}

}  // namespace

ConvexPiecewise convex_envelope(const SurfaceDensity& psi, const EnvelopeGrid& grid) {
    if (grid.samples < 2 || !(grid.s_max > 0.0)) fail("DegenerateGrid", "need >= 2 grid points");
    std::vector<double> xs(grid.samples), ys(grid.samples);
    double step = grid.s_max / static_cast<double>(grid.samples - 1);
    for (std::size_t i = 0; i < grid.samples; ++i) {
        xs[i] = step * static_cast<double>(i);
        ys[i] = psi(xs[i]);
    }
    return lower_hull(xs, ys);
}

EnvelopeTable subadditive_convex_envelope(const SurfaceDensity& psi, const EnvelopeGrid& grid) {
    if (grid.samples < 2 || !(grid.s_max > 0.0)) fail("DegenerateGrid", "need >= 2 grid points");
    double step = grid.s_max / static_cast<double>(grid.samples - 1);
    if (!(psi(0.0) > 0.0)) fail("NonPositivePsi", "inf psi must be > 0");

    EnvelopeTable env;
    env.step_ = step;
    env.hull_ = convex_envelope(psi, grid);
    wrap_tail(env.hull_, psi.tail_slope());

    // theta = inf over grid points s > 0 of hull(s)/s, against the tail slope.
    // Smallest minimiser wins; a strictly smaller tail pushes s0 to +inf.
    double ratio_min = kInf;
    double s0 = kInf;
    for (std::size_t i = 1; i < grid.samples; ++i) {
        double s = step * static_cast<double>(i);
        double r = env.hull_(s) / s;
        if (i == 1 || r < ratio_min - 1e-15 * (1.0 + std::abs(ratio_min))) {
            ratio_min = r;
            s0 = s;
        }
    }
    double tail = std::isinf(psi.tail_slope()) ? env.hull_.final_slope() : psi.tail_slope();
    if (tail < ratio_min - 1e-15 * (1.0 + std::abs(ratio_min))) {
        env.theta_ = tail;
        env.s0_ = kInf;
        env.provenance_ = "tail";
    } else {
        env.theta_ = ratio_min;
        env.s0_ = s0;
        env.provenance_ = "grid";
    }

    switch (psi.kind()) {
        case DensityKind::Constant:
            env.exact_below_ = true;
            env.alpha_ = psi.alpha();
            env.beta_ = 0.0;
            env.provenance_ = "constant/" + env.provenance_;
            break;
        case DensityKind::Quadratic:
            env.exact_below_ = true;
            env.alpha_ = psi.alpha();
            env.beta_ = psi.beta();
            env.provenance_ = "quadratic/" + env.provenance_;
            break;
        case DensityKind::SampleTable:
            env.provenance_ = "table/" + env.provenance_;
            break;
    }
    return env;
}

double EnvelopeTable::psi_tilde(double s) const {
    if (s < 0.0) fail("NegativeArgument", "psi_tilde argument must be >= 0");
    if (s > s0_) return theta_ * s;
    return exact_below_ ? exact_eval(s) : hull_(s);
}

double EnvelopeTable::lipschitz_bound() const {
    double m = hull_.max_abs_slope();
    if (!std::isinf(s0_)) m = std::max(m, theta_);
    return m;
}

double psi_c(const EnvelopeTable& env, double s) {
    if (s < 0.0) fail("NegativeArgument", "psi_c argument must be >= 0");
    return 2.0 * env.psi_tilde(0.5 * s);
}

double recession_theta(const EnvelopeTable& env) { return env.theta(); }

}  // namespace epirelax
