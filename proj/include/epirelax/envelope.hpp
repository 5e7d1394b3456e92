#pragma once

#include <string>
#include <vector>

#include "epirelax/common.hpp"

namespace epirelax {

// Surface energy densities psi: [0,inf) -> (0,inf) and their convex
// sub-additive envelopes. psi must be bounded away from zero: whatever the
// adatom density, creating surface always costs energy.
//
// The envelope is computed from samples on a uniform grid [0, s_max]
// (default 64 with 4097 points). Closed-form kinds are also evaluated
// exactly below the threshold so the only grid effect there is the location
// of s0 itself. The behaviour of psi beyond s_max is summarised by its
// recession slope: 0 for constants, +inf for genuinely quadratic growth, the
// declared tail slope for sample tables.

enum class DensityKind { Constant, Quadratic, SampleTable };

class SurfaceDensity {
public:
    static SurfaceDensity constant(double c);
    static SurfaceDensity quadratic(double alpha, double beta);
    /// Piecewise-linear samples (strictly increasing grid starting at 0) with
    /// a linear continuation of slope tail_slope beyond the last sample.
    static SurfaceDensity table(std::vector<double> grid, std::vector<double> values,
                                double tail_slope);

    DensityKind kind() const { return kind_; }
    double operator()(double s) const;
    /// Recession slope of psi beyond any finite sample window.
    double tail_slope() const { return tail_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

private:
    SurfaceDensity() = default;
    DensityKind kind_ = DensityKind::Constant;
    double alpha_ = 1.0, beta_ = 0.0;  // constant c stored in alpha_
    std::vector<double> grid_, values_;
    double tail_ = 0.0;
};

struct EnvelopeGrid {
    double s_max = 64.0;
    std::size_t samples = 4097;
};

/// Piecewise-linear convex function given by its hull vertices; evaluation
/// beyond the last vertex continues with the final slope.
struct ConvexPiecewise {
    std::vector<double> xs;
    std::vector<double> ys;
    double operator()(double s) const;
    double final_slope() const;
    double max_abs_slope() const;
};

/// Lower convex hull of psi sampled on the grid. Exact for the samples;
/// O(step^2) below smooth psi.
ConvexPiecewise convex_envelope(const SurfaceDensity& psi, const EnvelopeGrid& grid = {});

class EnvelopeTable {
public:
    double s0() const { return s0_; }                  // +inf when the ratio inf is only a tail limit
    double theta() const { return theta_; }
    const ConvexPiecewise& hull() const { return hull_; }
    double grid_step() const { return step_; }
    const std::string& provenance() const { return provenance_; }

    /// The convex sub-additive envelope.
    double psi_tilde(double s) const;
    /// Convex envelope of psi (no sub-additive correction).
    double psi_cvx(double s) const { return exact_below_ ? exact_eval(s) : hull_(s); }
    double lipschitz_bound() const;

    friend EnvelopeTable subadditive_convex_envelope(const SurfaceDensity& psi,
                                                     const EnvelopeGrid& grid);

private:
    ConvexPiecewise hull_;
    double s0_ = kInf;
    double theta_ = 0.0;
    double step_ = 0.0;
    bool exact_below_ = false;  // closed-form evaluation below s0
    double alpha_ = 0.0, beta_ = 0.0;
    std::string provenance_;

    double exact_eval(double s) const { return alpha_ + beta_ * s * s; }
};

EnvelopeTable subadditive_convex_envelope(const SurfaceDensity& psi, const EnvelopeGrid& grid = {});

/// Cut energy density: cheapest split of the density over the two crack
/// faces. Convexity of psi_tilde collapses the minimisation to the midpoint.
double psi_c(const EnvelopeTable& env, double s);

double recession_theta(const EnvelopeTable& env);

}  // namespace epirelax
