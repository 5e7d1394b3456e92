#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epirelax/adatom.hpp"
#include "epirelax/elastic.hpp"
#include "epirelax/envelope.hpp"
#include "epirelax/profile.hpp"
#include "epirelax/toml.hpp"

namespace epirelax {

// Experiment configuration. All files are TOML; parsers reject unknown keys.
//
// Profile spec file:
//   domain = [a, b]
//   [[arc]]    x = [...]  y = [...]
//   [[node]]   x = ...  left = ...  right = ...  value = ...   (optional)
//
// Experiment file: [profile] path, [surface_density] kind + parameters,
// optional [elasticity], optional [measure] with [[measure.density]] /
// [[measure.atom]] entries, [recovery] for the recover command.

Profile load_profile_file(const std::string& path);

struct MeasureSpecDensity {
    std::string tag;  // regular | jump | cut | all
    int index = -1;   // -1: every segment of that tag
    double value = 0.0;
};

struct ElasticityConfig {
    ElasticityTensor tensor;
    double depth = 1.0;
    int nx = 16;
    int ny = 8;
    BoundaryCondition bc = BoundaryCondition::ClampedBottom;
};

struct RecoveryConfig {
    std::vector<int> ks;
    double cell = 0.25;
    double rel_tol = 0.05;
    int grid_tries = 4096;
};

struct ExperimentConfig {
    std::string base_dir;
    Profile profile;
    SurfaceDensity psi = SurfaceDensity::constant(1.0);
    EnvelopeGrid envelope_grid;
    std::optional<ElasticityConfig> elasticity;
    std::vector<MeasureSpecDensity> densities;
    std::vector<Atom> atoms;
    std::optional<RecoveryConfig> recovery;
    std::string raw_text;  // hashed into output headers
};

ExperimentConfig load_experiment(const std::string& path);

/// Materialise the [measure] block on the decomposed profile graph.
AdatomMeasure build_measure(const ExperimentConfig& cfg, const ExtendedGraph& g);

/// psi sample table from a CSV with header "s,value".
SurfaceDensity load_density_csv(const std::string& path, double tail_slope);

}  // namespace epirelax
