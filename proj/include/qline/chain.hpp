#ifndef QLINE_CHAIN_HPP
#define QLINE_CHAIN_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qline/correlation.hpp"
#include "qline/types.hpp"

namespace qline {

// Two-channel detection chain behind the hybrid coupler. Sample values are
// complex quadrature amplitudes in sqrt(watt) at the amplifier input plane,
// scaled by sqrt(gain); |V|^2 is instantaneous power in the full Nyquist
// band.
struct ChainConfig {
  double sample_rate = 1e8;          // samples/s
  double bw_mhz = 55.0;              // analysis filter bandwidth
  double gain_db = 79.0;
  double noise_temp_k[2] = {7.0, 7.0};
  double terminator_temp_mk = 50.0;  // hybrid's idle input
  double carrier_ghz = 5.12;         // band center, sets the terminator quantum noise
  int jitter_samples = 1;            // 0 or 1
  std::size_t jitter_block = 10000;  // samples per acquisition block
  std::uint64_t rng_seed = 1;

  double gain_linear() const;
  // Per-channel amplifier noise power (W, input-referred) over the full band.
  double noise_power_w(int channel) const;
  void validate() const;
};

struct VoltageRecord {
  std::vector<std::complex<double>> ch1, ch2;
  double sample_rate = 1e8;
  double gain_linear = 1.0;
  std::string source; // descriptor
  std::uint64_t seed = 0;

  std::size_t size() const { return ch1.size(); }
};

// Binary record format: sidecar text header <path>.hdr plus raw
// interleaved little-endian float32 (re, im) pairs, channel 1 then
// channel 2, in <path>.
void write_record(const std::string& path, const VoltageRecord& rec);
VoltageRecord read_record(const std::string& path);

enum class SourceKind { coherent, thermal, vacuum };

// Gaussian synthesis of the reference sources through the splitter and
// amplifiers. power_w is the source power (full band) ahead of the
// splitter; the thermal source is white by default (the analysis filter in
// the estimator sets its correlation time), with optional pre-shaping.
VoltageRecord synthesize_reference(SourceKind kind, double power_w, const ChainConfig& cfg,
                                   double duration_s, double shaping_bw_mhz = 0.0);

// Channel-2 trigger jitter: per acquisition block, a uniform random shift
// of {-1, 0, +1} samples (cfg.jitter_samples = 1) or none.
VoltageRecord apply_record_jitter(const VoltageRecord& rec, const ChainConfig& cfg);

struct EstimatorOutput {
  CorrelationTrace trace;
  double net_power_w[2];
  double noise_power_w[2];
  std::size_t n_samples;
};

// Covariance estimator with noise-power subtraction:
// g2(tau) = 1 + <dP1(t) dP2(t+tau)> / ((<P1>-<P1N>)(<P2>-<P2N>)).
// Both records are passed through the same single-pole digital filter of
// bandwidth bw_mhz first. Standard errors by block bootstrap.
EstimatorOutput estimate_g2(const VoltageRecord& record, const VoltageRecord& noise_record,
                            double bw_mhz, const std::vector<double>& tau_ns);

// Deterministic named RNG streams: one engine per (seed, name).
std::uint64_t stream_seed(std::uint64_t seed, const std::string& name);

} // namespace qline

#endif
