#pragma once

#include <vector>

#include "epirelax/energy.hpp"

namespace epirelax {

// The convergence diagnostics of the natural topology: Hausdorff distance of
// subgraph complements (sees cracks closing inside the film, not outside),
// L1 distance of the subgraphs, and weak-star gaps of the adatom measures.

struct HausdorffResult {
    double distance = 0.0;
    double grid_error = 0.0;  // <= 2 * diag(box) / n
};

/// Symmetric Hausdorff distance between box\Omega_A and box\Omega_B sampled
/// on an n x n grid; complements are unbounded, so the box truncation plus
/// the reported resolution error is the contract.
HausdorffResult hausdorff_complement_distance(const Profile& pA, const Profile& pB,
                                              const BoundingBox& box, int n);

/// Integral of |h_A - h_B| over the common domain, exact on the merged
/// breakpoint/crossing partition.
double l1_subgraph_distance(const Profile& pA, const Profile& pB);

struct ConvergenceRow {
    int k = 0;
    double hausdorff_complement = 0.0;
    double l1_subgraph = 0.0;
    double weakstar_gap = 0.0;
    double F_total = 0.0;
    double G_limit = 0.0;
    double mass_error = 0.0;
    double area_error = 0.0;
};

struct VerifyOptions {
    double limsup_rel_tol = 0.05;
    double liminf_tol = 1e-6;
    double constraint_tol = 1e-12;
    int hausdorff_n = 256;
    double trend_atol = 1e-9;  // gaps below this count as converged regardless of trend
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double G_limit = 0.0;
    bool limsup_ok = false;
    bool liminf_ok = false;
    bool constraints_ok = false;
    bool topology_ok = false;

    bool all_ok() const { return limsup_ok && liminf_ok && constraints_ok && topology_ok; }
};

/// Least-squares slope of values against log k.
double trend_slope(const std::vector<int>& ks, const std::vector<double>& values);

/// Per-k diagnostics of a sequence of regular configurations against a limit
/// configuration, with the four verdict flags: limsup gap, liminf bound,
/// exact constraints, and decreasing topology gaps.
ConvergenceReport verify_sequence(const std::vector<RegularConfiguration>& seq,
                                  const std::vector<int>& ks, const Profile& limit_profile,
                                  const AdatomMeasure& limit_measure, const SurfaceDensity& psi,
                                  const EnvelopeTable& env, const VerifyOptions& opts = {});

}  // namespace epirelax
