#pragma once

#include <memory>
#include <optional>

#include "epirelax/adatom.hpp"
#include "epirelax/elastic.hpp"
#include "epirelax/envelope.hpp"
#include "epirelax/profile.hpp"

namespace epirelax {

// The two functionals of the model. The unrelaxed energy acts on regular
// configurations (Lipschitz profile, density on the graph, displacement);
// the relaxed one additionally weighs jump and cut segments with the
// envelope densities and atoms with the recession coefficient.

/// Density that is constant between consecutive x-breakpoints; values[i]
/// rides (xs[i], xs[i+1]).
struct PiecewiseDensity {
    std::vector<double> xs;
    std::vector<double> values;

    void validate() const;
    double value_at(double x) const;
};

struct RegularConfiguration {
    Profile profile;                 // no jumps, no cuts
    PiecewiseDensity density;        // u >= 0 along the graph
    std::optional<FilmMesh> mesh;
    std::optional<DisplacementField> displacement;

    void validate() const;
    /// The density as a measure on the decomposed graph (piece boundaries at
    /// the density breakpoints).
    AdatomMeasure as_measure() const;
};

struct EnergyBreakdown {
    double bulk = 0.0;
    double surface_regular = 0.0;
    double surface_jump = 0.0;
    double surface_cut = 0.0;
    double singular_part = 0.0;
    double total = 0.0;
    bool bulk_evaluated = false;

    double surface_total() const { return surface_regular + surface_jump + surface_cut + singular_part; }
};

/// Integral of psi(u) over the graph of a regular configuration; exact for
/// piecewise-constant densities on polylines.
double surface_energy_unrelaxed(const RegularConfiguration& cfg, const SurfaceDensity& psi);

/// Relaxed surface terms: psi_tilde on regular+jump parts, psi_c on cuts,
/// theta times the atomic mass.
EnergyBreakdown surface_energy_relaxed(const AdatomMeasure& mu, const EnvelopeTable& env);

EnergyBreakdown total_energy_F(const RegularConfiguration& cfg, const SurfaceDensity& psi,
                               const ElasticityTensor& C);

/// Relaxed energy; the bulk term is evaluated only when the profile is
/// Lipschitz and a displacement+mesh pair is supplied, otherwise the
/// breakdown reports bulk_evaluated = false.
EnergyBreakdown total_energy_G(const Profile& p, const AdatomMeasure& mu,
                               const EnvelopeTable& env, const ElasticityTensor& C,
                               const FilmMesh* mesh = nullptr,
                               const DisplacementField* v = nullptr);

}  // namespace epirelax
