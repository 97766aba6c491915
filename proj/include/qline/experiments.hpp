#ifndef QLINE_EXPERIMENTS_HPP
#define QLINE_EXPERIMENTS_HPP

#include <string>

#include "qline/config.hpp"

namespace qline {

// Exit codes: 0 ok, 2 config error, 3 numerical failure.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numeric_error = 3;

// Named figure reproductions. Writes one CSV per curve plus manifest.json
// into cfg.out_dir; on failure writes error.json with a machine-readable
// record and returns a nonzero code.
int run_experiment(const std::string& name, const ExperimentConfig& cfg);

bool known_experiment(const std::string& name);

// FNV-1a 64 over a file's bytes, hex-encoded; used for the manifest.
std::string file_hash(const std::string& path);

} // namespace qline

#endif
