#pragma once

#include <string>

#include "loopsim/config.hpp"

namespace loopsim {

// CLI command bodies. Each reads only the config sections it needs, writes
// its artifacts under out_dir, and throws on failure:
//   ConfigError          -> exit 2
//   IoError              -> exit 3
//   std::invalid_argument / std::domain_error (preconditions) -> exit 4
// All outputs embed the config hash and are byte-identical across reruns.

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void cmd_compile(const RunConfig& cfg, const std::string& out_dir);
void cmd_preview(const RunConfig& cfg, const std::string& out_dir);
void cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
void cmd_hom(const RunConfig& cfg, const std::string& out_dir);
void cmd_reconstruct(const RunConfig& cfg, const std::string& tags_path,
                     const std::string& out_dir);
void cmd_validate(const RunConfig& cfg, const std::string& events_path,
                  const std::string& mode, const std::string& reference_path,
                  const std::string& out_dir);
void cmd_fidelity(const std::string& dist_a_path, const std::string& dist_b_path,
                  const std::string& out_path);
void cmd_report(const RunConfig& cfg, const std::string& tags_path,
                const std::string& out_dir);

}  // namespace loopsim
