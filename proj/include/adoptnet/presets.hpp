#pragma once

#include "adoptnet/dynamics.hpp"
#include "adoptnet/graph.hpp"
#include "adoptnet/intervention.hpp"
#include "adoptnet/jumps.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Named experiment configurations and their JSON round-trip.  A config fully
// determines a run: model rates, jump behaviour, network family, spatial
// kernel, shock layout, and sweep grids.  Presets provide the figure/table
// parameter sets; a JSON file and CLI flags can override any field.

namespace adoptnet {

struct RunConfig {
    std::string preset_name = "baseline";

    ModelParams model;
    JumpParams jumps;

    // Generated-network family.
    NetworkKind net_kind = NetworkKind::random;
    int n = 30;
    GeneratorParams gen;
    double edge_weight_scale = 1.0; // multiplies relationship-graph weights

    // Spatial kernel.
    std::string kernel_kind = "knn"; // "knn" | "gaussian"
    int kernel_k = 4;
    double kernel_bandwidth = 0.1;
    double kernel_scale = 1.0;

    // Targeted-shock experiment defaults.
    ShockSpec shock;
    std::vector<double> durations = {1.0, 2.0, 4.0, 7.0};
    std::vector<double> intensities = {0.1, 0.2, 0.3, 0.4};

    // Feynman-Kac validation defaults.
    int fk_paths = 4000;
    double fk_time = 10.0;

    std::uint64_t seed = 1;

    SpatialKernel kernel() const; // throws ConfigError for unknown kind
    void validate() const;
};

// Known presets: baseline, fig1, fig2, fig3, table2.  Throws ConfigError for
// any other name.
RunConfig preset(const std::string& name);

// Canonical JSON (sorted keys) for hashing and manifests.
std::string config_to_json(const RunConfig& config);
// Applies the keys present in the JSON text over `base`; unknown keys are an
// error so typos never pass silently.
RunConfig config_from_json(const std::string& text, RunConfig base);
RunConfig load_config_file(const std::string& path, RunConfig base);

// FNV-1a hash of the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& config);

// Generated network with the configured family, weight scale applied.
SpatialNetwork build_network(const RunConfig& config);

} // namespace adoptnet
