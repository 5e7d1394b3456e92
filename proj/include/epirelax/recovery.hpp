#pragma once

#include <string>
#include <vector>

#include "epirelax/adatom.hpp"
#include "epirelax/energy.hpp"
#include "epirelax/envelope.hpp"
#include "epirelax/profile.hpp"

namespace epirelax {

// Construction of regular recovery sequences for a target (h, mu, m, M):
//
//   grid-constant projection -> finite-cut reduction -> Lipschitz
//   approximation with cut-strip interpolation + cell-wise density transport
//   -> wriggling of the intervals whose density exceeds the envelope
//   threshold -> closed-form area and density repairs.
//
// Every stage preserves the adatom mass and (after its repair step) the film
// area exactly; the emitted configurations are Lipschitz with piecewise
// constant densities.

/// Shallow cuts removed, deep cuts lose depth 1/k; the uniform lift
/// eps_k = (M - integral)/(b-a) >= 0 restores the film area exactly.
Profile finite_cut_reduction(const Profile& p, int k, double M);

struct CutStrip {
    double c = 0.0;           // cut abscissa
    double half_width = 0.0;  // eps0 / k
    double bottom = 0.0;      // point value at the cut
};

struct LipschitzApprox {
    Profile profile;               // k-Lipschitz, below the input outside fp noise
    std::vector<CutStrip> strips;  // interpolation strips, disjoint
    int k = 0;

    LipschitzApprox shifted_y(double c) const;
};

/// One-sided slope-k minorants between consecutive cuts (the inf-convolution
/// with k|x-z|, computed exactly on polylines), linearly interpolated to the
/// cut bottom inside each strip of half-width eps0/k.
LipschitzApprox lipschitz_approximation(const Profile& p, int k);

/// Split of a cut density over the two crack faces; convexity of the
/// envelope gives the midpoint, ties resolved toward the smallest left part.
std::pair<double, double> cut_split(double u_cut, const EnvelopeTable& env);

/// Cell-wise reassignment of a grid-constant measure onto the graph of the
/// approximation: regular/jump cells keep their mass per cell, cut cells put
/// the split masses on the left/right strip portions, and the additive
/// remainder r_k (optionally reported) makes the total mass exactly m.
AdatomMeasure transport_density(const AdatomMeasure& target_gc, const LipschitzApprox& approx,
                                const GridSpec& grid, double m, const EnvelopeTable& env,
                                double* r_fix_out = nullptr);

/// Oscillating profile with prescribed graph length r * H^1(Gamma_h),
/// matching endpoint values, h_k >= h, sup|h_k - h| <= 2/k. The domain is
/// panelled into k subintervals and the oscillation frequency of each panel
/// is found by a bracketing scan and bisection on the emitted polyline's
/// length, to 1e-10.
Profile wriggle(const Profile& h, double r, int k);

enum class RecoveryStageTag { GridConstant, FiniteCuts, LipschitzApprox, Wriggled, ConstraintFixed };

const char* to_string(RecoveryStageTag tag);

struct StageRow {
    int k = 0;
    RecoveryStageTag stage = RecoveryStageTag::GridConstant;
    double area = 0.0;
    double mass = 0.0;
    double h1_regular = 0.0;
    double h1_jump = 0.0;
    double h1_cut = 0.0;
    double F_surface = 0.0;  // 0 for stages that are not yet regular
    double F_bulk = 0.0;
    double G_surface = 0.0;
    double hausdorff_gap = 0.0;
    double weakstar_gap = 0.0;
};

struct RecoveryOptions {
    int grid_max_tries = 4096;
    int hausdorff_n = 192;
    bool stage_gaps = true;  // per-stage topology gaps (costs a few EDTs)
    int threads = 1;         // independent k values may run concurrently
};

struct RecoveryResult {
    GridSpec grid;
    std::vector<int> ks;
    std::vector<RegularConfiguration> configs;  // one per k
    std::vector<StageRow> rows;
    // bookkeeping per k
    std::vector<double> eps_k, gamma_k, t_k, r_fix_k;
};

RecoveryResult build_recovery_sequence(const Profile& p, const AdatomMeasure& mu, double m,
                                       double M, const std::vector<int>& ks,
                                       const SurfaceDensity& psi, const EnvelopeTable& env,
                                       double cell, const RecoveryOptions& opts = {});

}  // namespace epirelax
