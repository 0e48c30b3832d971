#pragma once

// Configuration-driven front end: one declarative JSON config selects a stage
// and its parameters; every stage writes plot-ready CSV/JSON plus a manifest
// with the config hash, per-file checksums and solver residuals.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sww/spectral.hpp"

namespace sww {

enum class Stage { kTrivialContinue, kRegionMap, kStokesBranch, kPersist, kSweep };

Stage stage_from_string(const std::string& name);
std::string stage_to_string(Stage s);

struct RunConfig {
    Stage stage = Stage::kRegionMap;
    SpectralConfig spectral;
    double g = 1.0;
    double h = 1.0;
    double c = 0.0;
    PeriodicField bottom;                     // assembled from the config
    std::map<std::string, double> tolerances;  // newton, trace, refine, ...
    nlohmann::json stage_params;               // stage-specific knobs
    std::filesystem::path output_dir = "out";
    uint64_t seed = 0;
    int workers = 1;

    double tolerance(const std::string& name, double fallback) const;
};

// Parses and validates; error messages carry the offending field path.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// Exit codes: 0 success, 2 validation, 3 convergence, 4 resolution.
inline constexpr int kExitValidation = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitResolution = 4;

// Runs the configured stage; artifacts land in config.output_dir (overridable
// by the SWW_OUTPUT_DIR environment variable). Throws the sww error types.
void run(const RunConfig& config);

// Exception-to-exit-code wrapper used by the binary.
int run_with_exit_code(const RunConfig& config, std::string* message = nullptr);

}  // namespace sww
