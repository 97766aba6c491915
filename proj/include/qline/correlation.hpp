#ifndef QLINE_CORRELATION_HPP
#define QLINE_CORRELATION_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include "qline/types.hpp"

namespace qline {

// tau >= 0 half of a symmetric g2 trace; g2(-tau) = g2(tau).
struct CorrelationTrace {
  std::vector<double> tau_ns;
  std::vector<double> g2;
  std::vector<double> stderr_g2; // empty for theory traces
  Port port = Port::reflection;
  double bw_mhz = 0.0; // 0 = infinite bandwidth
  bool jitter_applied = false;
  double power_dbm = 0.0;

  double at_zero() const { return g2.empty() ? 0.0 : g2.front(); }
};

// Default grid matching the digitizer: 10 ns spacing out to +400 ns.
std::vector<double> default_tau_grid_ns(double step_ns = 10.0, double max_ns = 400.0);

// Infinite-bandwidth photon statistics of the selected port.
CorrelationTrace g2_ideal(const AtomParams& atom, const DriveSpec& drive, Port port,
                          const std::vector<double>& tau_ns);

// Statistics seen through the single-mode filter resonator (cascaded
// system), kappa = 2 pi bw.
CorrelationTrace g2_filtered(const AtomParams& atom, const DriveSpec& drive, Port port,
                             double bw_mhz, const std::vector<double>& tau_ns,
                             int n_max = 10, double thermal_occupation = 0.0);

// Digitizer trigger jitter model: each point replaced by the average of
// g2(tau), g2(tau - 10 ns) and g2(tau + 10 ns). Requires the grid spacing
// to divide 10 ns.
CorrelationTrace apply_trigger_jitter(const CorrelationTrace& trace);

enum class ReferenceKind { thermal, coherent };

// Closed forms: thermal 1 + exp(-2 pi BW |tau|), coherent 1.
CorrelationTrace g2_reference(ReferenceKind kind, double bw_mhz,
                              const std::vector<double>& tau_ns);

void write_trace_csv(std::ostream& os, const CorrelationTrace& trace);

} // namespace qline

#endif
