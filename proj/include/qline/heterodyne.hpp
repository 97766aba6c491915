#ifndef QLINE_HETERODYNE_HPP
#define QLINE_HETERODYNE_HPP

#include "qline/chain.hpp"
#include "qline/types.hpp"

namespace qline {

struct SmeOptions {
  // Integration substeps per digitizer sample; 0 picks automatically so
  // that (total rate) * dt <= max_rate_step.
  int substeps = 0;
  double max_rate_step = 0.05;
  // Settling time discarded at the start of each trajectory, in atom
  // lifetimes.
  double burn_in_lifetimes = 20.0;
  double thermal_occupation = 0.0;
};

// Heterodyne-unraveled stochastic master equation for the atom, monitored
// through both outputs of the beam splitter at once. Classical amplifier
// noise and gain are added per channel; trajectories are concatenated with
// independent named RNG streams.
VoltageRecord synthesize_atom_output(const AtomParams& atom, const DriveSpec& drive, Port port,
                                     const ChainConfig& cfg, double duration_s,
                                     int n_trajectories, const SmeOptions& opts = {});

} // namespace qline

#endif
