#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "loopsim/imperfection.hpp"
#include "loopsim/protocol.hpp"

namespace loopsim {

// Raised with the dotted path of the offending field so the CLI can emit a
// machine-readable error.
struct ConfigError : std::runtime_error {
    ConfigError(std::string field_path, const std::string& message)
        : std::runtime_error(message), field(std::move(field_path)) {}
    std::string field;
};

struct SimulationConfig {
    int n_frames = 10000;
    uint64_t seed = 1;
    double detector_efficiency = 1.0;
    double jitter_sigma_ps = 0.0;
    double window_ns = 3.0;
    int64_t t0_ps = 0;
    std::string model = "indistinguishable";  // indistinguishable | distinguishable | mixture
    int threads = 1;
    double histogram_bin_ns = 1.0;
    double peak_window_ns = 3.0;
};

struct ValidationConfig {
    int clusters = 12;
    int sample_size = 700;
    int repeats = 100;
};

// One config file drives every subcommand; keys a subcommand does not use
// are ignored by it.
struct RunConfig {
    ExperimentSpec experiment;
    SourceModel source;
    SimulationConfig simulation;
    ValidationConfig validation;
    std::string output_dir = "out";

    nlohmann::json to_json() const;
    // 16-hex-digit FNV-1a of the canonical serialized form; embedded in
    // every output file.
    std::string hash() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace loopsim
