#ifndef QLINE_CONFIG_HPP
#define QLINE_CONFIG_HPP

#include <string>
#include <vector>

#include "qline/chain.hpp"
#include "qline/types.hpp"

namespace qline {

// Flat key = value configuration with unit suffixes, e.g.
//   omega01 = 5.12 GHz
//   power   = -132 dBm, -129 dBm
//   bw      = 55 MHz
// Defaults are the measured device. Environment variables prefixed
// QLINE_ override file keys (QLINE_SEED, QLINE_SAMPLES, ...).
struct ExperimentConfig {
  double omega01_ghz = 5.12;
  double gamma10_mhz = 41.0;
  double gamma_phi_mhz = 1.0;

  std::vector<double> power_dbm;     // drive sweep, dBm at the atom
  Port port = Port::reflection;
  std::vector<double> bw_mhz = {55.0};

  ChainConfig chain;
  std::size_t samples = 10000000;
  int threads = 0; // 0 = hardware default
  int n_trajectories = 64;
  double tau_step_ns = 10.0;
  double tau_max_ns = 400.0;
  double temperature_mk = 50.0; // line temperature behind the theory curves

  // Bose occupation of the line at omega01 for the configured temperature.
  double thermal_occupation() const {
    return units::thermal_occupation(units::ghz_to_rad(omega01_ghz), temperature_mk * 1e-3);
  }

  std::string out_dir = "out";
  std::uint64_t seed = 1;

  AtomParams atom() const {
    return AtomParams::from_ghz_mhz(omega01_ghz, gamma10_mhz, gamma_phi_mhz);
  }
  std::vector<double> tau_grid_ns() const;
};

// Parse and normalize; throws ConfigError with aggregated line-anchored
// messages. echo, when given, receives one line per sweep point with the
// derived photon number N and Rabi frequency.
ExperimentConfig validate_config(const std::string& path, std::string* echo = nullptr);
ExperimentConfig parse_config_text(const std::string& text, std::string* echo = nullptr);

std::string config_echo(const ExperimentConfig& cfg);

} // namespace qline

#endif
