#include "qline/chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "qline/errors.hpp"
#include "qline/units.hpp"

namespace qline {

double ChainConfig::gain_linear() const { return units::db_to_linear(gain_db); }

double ChainConfig::noise_power_w(int channel) const {
  return units::k_boltzmann * noise_temp_k[channel] * sample_rate;
}

void ChainConfig::validate() const {
  // Complex I/Q samples: each carries two real samples, so the usable band
  // is the full sample_rate and fs >= bw is the oversampling condition.
  if (sample_rate < bw_mhz * 1e6)
    throw ConfigError("ChainConfig: sample_rate must oversample the analysis bandwidth");
  if (gain_linear() <= 0.0) throw ConfigError("ChainConfig: gain must be positive");
  if (jitter_samples != 0 && jitter_samples != 1)
    throw ConfigError("ChainConfig: jitter_samples must be 0 or 1");
}

std::uint64_t stream_seed(std::uint64_t seed, const std::string& name) {
  // FNV-1a over the stream name, folded with the user seed.
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  h ^= seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

namespace {

using Cxd = std::complex<double>;

struct GaussianStream {
  std::mt19937_64 eng;
  std::normal_distribution<double> dist{0.0, 1.0};
  explicit GaussianStream(std::uint64_t s) : eng(s) {}
  // Circular complex Gaussian with E|z|^2 = var.
  Cxd complex(double var) {
    double s = std::sqrt(0.5 * var);
    return {s * dist(eng), s * dist(eng)};
  }
};

} // namespace

VoltageRecord synthesize_reference(SourceKind kind, double power_w, const ChainConfig& cfg,
                                   double duration_s, double shaping_bw_mhz) {
  cfg.validate();
  if (power_w < 0.0 || duration_s <= 0.0)
    throw std::invalid_argument("synthesize_reference: bad power or duration");
  const std::size_t n = std::size_t(duration_s * cfg.sample_rate);
  if (n < 10000) throw std::invalid_argument("synthesize_reference: record too short");

  GaussianStream src(stream_seed(cfg.rng_seed, "source"));
  GaussianStream vac(stream_seed(cfg.rng_seed, "terminator"));
  GaussianStream amp1(stream_seed(cfg.rng_seed, "amp1"));
  GaussianStream amp2(stream_seed(cfg.rng_seed, "amp2"));

  const double root_g = std::sqrt(cfg.gain_linear());
  const double pn1 = cfg.noise_power_w(0), pn2 = cfg.noise_power_w(1);
  // Idle hybrid input: Gaussian stand-in for the cold terminator, at the
  // Bose occupation of the band center rather than the Rayleigh-Jeans kT.
  const double omega_c = units::ghz_to_rad(cfg.carrier_ghz);
  const double pterm = units::thermal_occupation(omega_c, cfg.terminator_temp_mk * 1e-3) *
                       units::hbar * omega_c * cfg.sample_rate;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  const double shape_a =
      shaping_bw_mhz > 0.0 ? std::exp(-M_PI * shaping_bw_mhz * 1e6 / cfg.sample_rate) : 0.0;
  Cxd ou = 0.0;
  if (shaping_bw_mhz > 0.0) ou = src.complex(power_w); // stationary start

  VoltageRecord rec;
  rec.sample_rate = cfg.sample_rate;
  rec.gain_linear = cfg.gain_linear();
  rec.seed = cfg.rng_seed;
  rec.source = kind == SourceKind::coherent   ? "coherent"
               : kind == SourceKind::thermal ? "thermal"
                                             : "vacuum";
  rec.ch1.resize(n);
  rec.ch2.resize(n);

  const Cxd coherent_amp = std::sqrt(power_w); // fixed phase
  for (std::size_t k = 0; k < n; ++k) {
    Cxd s = 0.0;
    switch (kind) {
      case SourceKind::coherent:
        s = coherent_amp;
        break;
      case SourceKind::thermal:
        if (shaping_bw_mhz > 0.0) {
          ou = shape_a * ou + std::sqrt(1.0 - shape_a * shape_a) * src.complex(power_w);
          s = ou;
        } else {
          s = src.complex(power_w);
        }
        break;
      case SourceKind::vacuum:
        break;
    }
    Cxd v = pterm > 0.0 ? vac.complex(pterm) : Cxd(0.0);
    rec.ch1[k] = root_g * ((s + v) * inv_sqrt2 + amp1.complex(pn1));
    rec.ch2[k] = root_g * ((s - v) * inv_sqrt2 + amp2.complex(pn2));
  }
  return rec;
}

VoltageRecord apply_record_jitter(const VoltageRecord& rec, const ChainConfig& cfg) {
  cfg.validate();
  if (cfg.jitter_samples == 0) return rec;
  VoltageRecord out = rec;
  std::mt19937_64 eng(stream_seed(cfg.rng_seed, "trigger-jitter"));
  std::uniform_int_distribution<int> shift(-1, 1);
  const std::ptrdiff_t n = std::ptrdiff_t(rec.size());
  for (std::ptrdiff_t b0 = 0; b0 < n; b0 += std::ptrdiff_t(cfg.jitter_block)) {
    int s = shift(eng);
    std::ptrdiff_t b1 = std::min<std::ptrdiff_t>(b0 + cfg.jitter_block, n);
    for (std::ptrdiff_t k = b0; k < b1; ++k) {
      std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(k + s, 0, n - 1);
      out.ch2[std::size_t(k)] = rec.ch2[std::size_t(j)];
    }
  }
  return out;
}

namespace {

std::vector<double> filtered_power(const std::vector<Cxd>& x, double a) {
  std::vector<double> p(x.size());
  Cxd y = 0.0;
  const double b = 1.0 - a;
  for (std::size_t k = 0; k < x.size(); ++k) {
    y = a * y + b * x[k];
    p[k] = std::norm(y);
  }
  return p;
}

} // namespace

EstimatorOutput estimate_g2(const VoltageRecord& record, const VoltageRecord& noise_record,
                            double bw_mhz, const std::vector<double>& tau_ns) {
  if (!(bw_mhz > 0.0)) throw std::invalid_argument("estimate_g2: bw must be > 0");
  const double fs = record.sample_rate;
  if (noise_record.sample_rate != fs)
    throw std::invalid_argument("estimate_g2: sample-rate mismatch with noise record");
  if (fs < bw_mhz * 1e6) // complex samples: full fs band usable
    throw std::invalid_argument("estimate_g2: record does not oversample the bandwidth");

  const double a = std::exp(-M_PI * bw_mhz * 1e6 / fs);
  auto p1 = filtered_power(record.ch1, a);
  auto p2 = filtered_power(record.ch2, a);
  auto n1 = filtered_power(noise_record.ch1, a);
  auto n2 = filtered_power(noise_record.ch2, a);

  // Drop the filter transient.
  const std::size_t settle = std::size_t(std::min<double>(10.0 * fs / (M_PI * bw_mhz * 1e6),
                                                          double(p1.size()) / 4.0));
  auto mean_from = [&](const std::vector<double>& v, std::size_t from) {
    double s = 0.0;
    for (std::size_t k = from; k < v.size(); ++k) s += v[k];
    return s / double(v.size() - from);
  };
  const std::size_t nsettle = std::min(settle, n1.size() / 2);
  const double pn1 = mean_from(n1, nsettle);
  const double pn2 = mean_from(n2, nsettle);

  // Integer lags on the sample grid.
  std::vector<std::size_t> lags;
  for (double t : tau_ns) {
    double l = t * 1e-9 * fs;
    long m = std::lround(l);
    if (m < 0 || std::abs(l - double(m)) > 1e-6)
      throw std::invalid_argument("estimate_g2: tau grid must sit on the sample grid");
    lags.push_back(std::size_t(m));
  }
  const std::size_t max_lag = lags.empty() ? 0 : *std::max_element(lags.begin(), lags.end());

  // Block statistics; blocks also drive the bootstrap errors.
  const std::size_t block = std::max<std::size_t>(std::size_t(10.0 * fs / (bw_mhz * 1e6)), 256);
  if (p1.size() < settle + 4 * block + max_lag)
    throw std::invalid_argument("estimate_g2: record too short for block statistics");

  const std::size_t n_start = settle;
  const std::size_t nb = (p1.size() - n_start) / block;
  const std::size_t nl = lags.size();

  std::vector<double> bs1(nb, 0.0), bs2(nb, 0.0);
  std::vector<double> bcount(nb, 0.0);
  std::vector<std::vector<double>> bprod(nb, std::vector<double>(nl, 0.0));
  std::vector<std::vector<double>> bpcnt(nb, std::vector<double>(nl, 0.0));
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = n_start + b * block, hi = lo + block;
    for (std::size_t k = lo; k < hi; ++k) {
      bs1[b] += p1[k];
      bs2[b] += p2[k];
    }
    bcount[b] = double(block);
    for (std::size_t li = 0; li < nl; ++li) {
      const std::size_t m = lags[li];
      for (std::size_t k = lo; k + m < hi; ++k) bprod[b][li] += p1[k] * p2[k + m];
      bpcnt[b][li] = double(block > m ? block - m : 0);
    }
  }

  // Block means of the calibration record, so the bootstrap can carry the
  // noise-subtraction uncertainty as well.
  const std::size_t nbn = n1.size() > nsettle ? (n1.size() - nsettle) / block : 0;
  std::vector<double> vs1(nbn, 0.0), vs2(nbn, 0.0);
  for (std::size_t b = 0; b < nbn; ++b) {
    const std::size_t lo = nsettle + b * block, hi = lo + block;
    for (std::size_t k = lo; k < hi; ++k) {
      vs1[b] += n1[k];
      vs2[b] += n2[k];
    }
  }

  auto assemble = [&](const std::vector<std::size_t>& pick, double pn1_use, double pn2_use,
                      std::vector<double>& g2_out, double* net1_out, double* net2_out) {
    double s1 = 0.0, s2 = 0.0, cnt = 0.0;
    std::vector<double> pr(nl, 0.0), pc(nl, 0.0);
    for (std::size_t b : pick) {
      s1 += bs1[b];
      s2 += bs2[b];
      cnt += bcount[b];
      for (std::size_t li = 0; li < nl; ++li) {
        pr[li] += bprod[b][li];
        pc[li] += bpcnt[b][li];
      }
    }
    const double m1 = s1 / cnt, m2 = s2 / cnt;
    const double net1 = m1 - pn1_use, net2 = m2 - pn2_use;
    if (net1 <= 0.0 || net2 <= 0.0)
      throw CalibrationError("estimate_g2: non-positive net power after noise subtraction");
    g2_out.resize(nl);
    for (std::size_t li = 0; li < nl; ++li) {
      double cov = pr[li] / pc[li] - m1 * m2;
      g2_out[li] = 1.0 + cov / (net1 * net2);
    }
    if (net1_out) *net1_out = net1;
    if (net2_out) *net2_out = net2;
  };

  std::vector<std::size_t> all(nb);
  for (std::size_t b = 0; b < nb; ++b) all[b] = b;
  EstimatorOutput out;
  double net1 = 0.0, net2 = 0.0;
  assemble(all, pn1, pn2, out.trace.g2, &net1, &net2);

  // Block bootstrap for the per-lag standard error. Both records are
  // resampled, so the noise-subtraction uncertainty is included.
  const int boots = 64;
  std::mt19937_64 eng(stream_seed(record.seed, "bootstrap"));
  std::uniform_int_distribution<std::size_t> pickb(0, nb - 1);
  std::uniform_int_distribution<std::size_t> pickn(0, nbn > 0 ? nbn - 1 : 0);
  std::vector<double> acc(nl, 0.0), acc2(nl, 0.0);
  std::vector<std::size_t> pick(nb);
  std::vector<double> g2b;
  int used = 0;
  for (int it = 0; it < boots; ++it) {
    for (std::size_t b = 0; b < nb; ++b) pick[b] = pickb(eng);
    double bn1 = pn1, bn2 = pn2;
    if (nbn > 0) {
      double a1 = 0.0, a2 = 0.0;
      for (std::size_t b = 0; b < nbn; ++b) {
        std::size_t j = pickn(eng);
        a1 += vs1[j];
        a2 += vs2[j];
      }
      bn1 = a1 / double(nbn * block);
      bn2 = a2 / double(nbn * block);
    }
    try {
      assemble(pick, bn1, bn2, g2b, nullptr, nullptr);
    } catch (const CalibrationError&) {
      continue; // replicate fell below the noise floor; drop it
    }
    ++used;
    for (std::size_t li = 0; li < nl; ++li) {
      acc[li] += g2b[li];
      acc2[li] += g2b[li] * g2b[li];
    }
  }
  if (used < boots / 2)
    throw CalibrationError("estimate_g2: bootstrap unstable, signal too close to the noise floor");
  out.trace.stderr_g2.resize(nl);
  for (std::size_t li = 0; li < nl; ++li) {
    double m = acc[li] / used;
    out.trace.stderr_g2[li] = std::sqrt(std::max(acc2[li] / used - m * m, 0.0));
  }

  out.trace.tau_ns = tau_ns;
  out.trace.bw_mhz = bw_mhz;
  out.net_power_w[0] = net1;
  out.net_power_w[1] = net2;
  out.noise_power_w[0] = pn1;
  out.noise_power_w[1] = pn2;
  out.n_samples = p1.size() - n_start;
  return out;
}

void write_record(const std::string& path, const VoltageRecord& rec) {
  {
    std::ofstream hdr(path + ".hdr");
    if (!hdr) throw std::runtime_error("write_record: cannot open " + path + ".hdr");
    hdr.precision(17);
    hdr << "qline voltage record v1\n";
    hdr << "samples " << rec.size() << "\n";
    hdr << "sample_rate " << rec.sample_rate << "\n";
    hdr << "gain_linear " << rec.gain_linear << "\n";
    hdr << "seed " << rec.seed << "\n";
    hdr << "source " << rec.source << "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_record: cannot open " + path);
  auto dump = [&](const std::vector<Cxd>& ch) {
    for (Cxd z : ch) {
      float re = float(z.real()), im = float(z.imag());
      f.write(reinterpret_cast<const char*>(&re), sizeof re);
      f.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  };
  dump(rec.ch1);
  dump(rec.ch2);
}

VoltageRecord read_record(const std::string& path) {
  VoltageRecord rec;
  std::size_t n = 0;
  {
    std::ifstream hdr(path + ".hdr");
    if (!hdr) throw std::runtime_error("read_record: cannot open " + path + ".hdr");
    std::string line, key;
    std::getline(hdr, line);
    if (line != "qline voltage record v1")
      throw std::runtime_error("read_record: bad header magic");
    while (hdr >> key) {
      if (key == "samples")
        hdr >> n;
      else if (key == "sample_rate")
        hdr >> rec.sample_rate;
      else if (key == "gain_linear")
        hdr >> rec.gain_linear;
      else if (key == "seed")
        hdr >> rec.seed;
      else if (key == "source")
        hdr >> rec.source;
      else {
        std::string skip;
        std::getline(hdr, skip);
      }
    }
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_record: cannot open " + path);
  auto slurp = [&](std::vector<Cxd>& ch) {
    ch.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      float re, im;
      f.read(reinterpret_cast<char*>(&re), sizeof re);
      f.read(reinterpret_cast<char*>(&im), sizeof im);
      ch[k] = {double(re), double(im)};
    }
  };
  slurp(rec.ch1);
  slurp(rec.ch2);
  if (!f) throw std::runtime_error("read_record: truncated payload in " + path);
  return rec;
}

} // namespace qline
