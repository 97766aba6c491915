#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "qline/chain.hpp"
#include "qline/errors.hpp"

using namespace qline;

namespace {

ChainConfig test_config(std::uint64_t seed = 42) {
  ChainConfig cfg;
  cfg.rng_seed = seed;
  return cfg;
}

double thermal_power(const ChainConfig& cfg) {
  // Source well above the amplifier noise floor, like the bench calibration.
  return 20.0 * (cfg.noise_power_w(0) + cfg.noise_power_w(1));
}

} // namespace

TEST_CASE("thermal reference reproduces the bandwidth-set bunching curve") {
  ChainConfig cfg = test_config();
  double dur = 2e6 / cfg.sample_rate;
  VoltageRecord rec = synthesize_reference(SourceKind::thermal, thermal_power(cfg), cfg, dur);
  VoltageRecord noise = synthesize_reference(SourceKind::vacuum, 0.0, test_config(43), dur);

  std::vector<double> taus = default_tau_grid_ns(10.0, 100.0);
  EstimatorOutput out = estimate_g2(rec, noise, 55.0, taus);
  for (std::size_t k = 0; k < taus.size(); ++k) {
    double want = 1.0 + std::exp(-units::mhz_to_rad(55.0) * taus[k] * 1e-9);
    CHECK(std::abs(out.trace.g2[k] - want) < 0.15);
  }
  CHECK(out.trace.at_zero() == doctest::Approx(2.0).epsilon(0.06));
}

TEST_CASE("coherent reference is flat at one") {
  ChainConfig cfg = test_config(7);
  double dur = 2e6 / cfg.sample_rate;
  VoltageRecord rec = synthesize_reference(SourceKind::coherent, thermal_power(cfg), cfg, dur);
  VoltageRecord noise = synthesize_reference(SourceKind::vacuum, 0.0, test_config(8), dur);

  EstimatorOutput out = estimate_g2(rec, noise, 55.0, default_tau_grid_ns(10.0, 200.0));
  for (double v : out.trace.g2) CHECK(std::abs(v - 1.0) < 0.05);
}

TEST_CASE("vacuum channels carry uncorrelated power") {
  ChainConfig cfg = test_config(11);
  std::size_t n = 500000;
  VoltageRecord rec =
      synthesize_reference(SourceKind::vacuum, 0.0, cfg, double(n) / cfg.sample_rate);

  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += std::norm(rec.ch1[i]);
    m2 += std::norm(rec.ch2[i]);
  }
  m1 /= double(n);
  m2 /= double(n);
  double cov = 0.0, v1 = 0.0, v2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d1 = std::norm(rec.ch1[i]) - m1, d2 = std::norm(rec.ch2[i]) - m2;
    cov += d1 * d2;
    v1 += d1 * d1;
    v2 += d2 * d2;
  }
  double corr = cov / std::sqrt(v1 * v2);
  CHECK(std::abs(corr) < 4.0 / std::sqrt(double(n)));
}

TEST_CASE("estimator is exactly invariant under common gain rescaling") {
  ChainConfig cfg = test_config(21);
  double dur = 3e5 / cfg.sample_rate;
  VoltageRecord rec = synthesize_reference(SourceKind::thermal, thermal_power(cfg), cfg, dur);
  VoltageRecord noise = synthesize_reference(SourceKind::vacuum, 0.0, test_config(22), dur);

  std::vector<double> taus = default_tau_grid_ns(10.0, 100.0);
  EstimatorOutput base = estimate_g2(rec, noise, 55.0, taus);

  // Power-of-two scaling keeps every float operation bit-identical.
  auto scale = [](VoltageRecord r, double s) {
    for (auto& v : r.ch1) v *= s;
    for (auto& v : r.ch2) v *= s;
    r.gain_linear *= s * s;
    return r;
  };
  EstimatorOutput scaled = estimate_g2(scale(rec, 4.0), scale(noise, 4.0), 55.0, taus);
  for (std::size_t k = 0; k < taus.size(); ++k)
    CHECK(scaled.trace.g2[k] == base.trace.g2[k]); // bitwise
}

TEST_CASE("bootstrap standard error shrinks as one over root record length") {
  std::vector<double> lens = {2e5, 8e5, 3.2e6};
  std::vector<double> ses;
  for (double n : lens) {
    ChainConfig cfg = test_config(33);
    double dur = n / cfg.sample_rate;
    VoltageRecord rec = synthesize_reference(SourceKind::thermal, thermal_power(cfg), cfg, dur);
    VoltageRecord noise =
        synthesize_reference(SourceKind::vacuum, 0.0, test_config(34), dur);
    EstimatorOutput out = estimate_g2(rec, noise, 55.0, {0.0, 10.0, 20.0});
    REQUIRE(!out.trace.stderr_g2.empty());
    ses.push_back(out.trace.stderr_g2[0]);
  }
  double slope = std::log(ses.back() / ses.front()) / std::log(lens.back() / lens.front());
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.3));
}

TEST_CASE("estimator rejects records dominated by noise") {
  ChainConfig cfg = test_config(55);
  double dur = 1e5 / cfg.sample_rate;
  VoltageRecord rec = synthesize_reference(SourceKind::vacuum, 0.0, cfg, dur);
  VoltageRecord noise = synthesize_reference(SourceKind::vacuum, 0.0, test_config(55), dur);
  CHECK_THROWS_AS((void)estimate_g2(rec, noise, 55.0, {0.0, 10.0}), CalibrationError);
}

TEST_CASE("voltage records survive a file round trip") {
  ChainConfig cfg = test_config(66);
  VoltageRecord rec =
      synthesize_reference(SourceKind::thermal, thermal_power(cfg), cfg, 20000.0 / cfg.sample_rate);
  std::string path = (std::filesystem::temp_directory_path() / "qline_rec_test.bin").string();
  write_record(path, rec);
  VoltageRecord back = read_record(path);
  std::remove(path.c_str());
  std::remove((path + ".hdr").c_str());

  REQUIRE(back.size() == rec.size());
  CHECK(back.sample_rate == rec.sample_rate);
  CHECK(back.seed == rec.seed);
  double maxd = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    maxd = std::max(maxd, std::abs(back.ch1[i] - rec.ch1[i]));
    maxd = std::max(maxd, std::abs(back.ch2[i] - rec.ch2[i]));
  }
  // float32 storage of O(sqrt(W)) amplitudes
  CHECK(maxd < 1e-6 * std::sqrt(thermal_power(cfg) * cfg.gain_linear()));
}

TEST_CASE("record jitter: disabled is the identity, enabled shifts whole blocks") {
  ChainConfig cfg = test_config(77);
  cfg.jitter_block = 1000;
  VoltageRecord rec =
      synthesize_reference(SourceKind::thermal, thermal_power(cfg), cfg, 10000.0 / cfg.sample_rate);

  ChainConfig off = cfg;
  off.jitter_samples = 0;
  VoltageRecord same = apply_record_jitter(rec, off);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(same.ch1[i] == rec.ch1[i]);
    CHECK(same.ch2[i] == rec.ch2[i]);
  }

  VoltageRecord jit = apply_record_jitter(rec, cfg);
  // Channel 1 untouched; channel 2 is a per-block resample of the original.
  int moved_blocks = 0;
  for (std::size_t b = 0; b < rec.size() / cfg.jitter_block; ++b) {
    std::size_t i = b * cfg.jitter_block + cfg.jitter_block / 2;
    CHECK(jit.ch1[i] == rec.ch1[i]);
    bool minus = jit.ch2[i] == rec.ch2[i - 1];
    bool zero = jit.ch2[i] == rec.ch2[i];
    bool plus = jit.ch2[i] == rec.ch2[i + 1];
    CHECK((minus || zero || plus));
    if (!zero) ++moved_blocks;
  }
  CHECK(moved_blocks > 0); // shifts of +-1 sample do occur
}

TEST_CASE("named RNG streams are deterministic and distinct") {
  CHECK(stream_seed(1, "alpha") == stream_seed(1, "alpha"));
  CHECK(stream_seed(1, "alpha") != stream_seed(2, "alpha"));
  CHECK(stream_seed(1, "alpha") != stream_seed(1, "beta"));
}

TEST_CASE("synthesis is reproducible for a fixed seed and differs across seeds") {
  ChainConfig cfg = test_config(99);
  double dur = 20000.0 / cfg.sample_rate;
  VoltageRecord a = synthesize_reference(SourceKind::thermal, thermal_power(cfg), cfg, dur);
  VoltageRecord b = synthesize_reference(SourceKind::thermal, thermal_power(cfg), cfg, dur);
  CHECK(a.ch1 == b.ch1);
  CHECK(a.ch2 == b.ch2);

  VoltageRecord c =
      synthesize_reference(SourceKind::thermal, thermal_power(cfg), test_config(100), dur);
  CHECK(a.ch1 != c.ch1);
}

TEST_CASE("configuration validation rejects inconsistent chains") {
  ChainConfig cfg = test_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.bw_mhz = 120.0; // beyond the 100 MS/s complex Nyquist band
  CHECK_THROWS(cfg.validate());
  cfg = test_config();
  cfg.jitter_samples = 3;
  CHECK_THROWS(cfg.validate());
}
