#include "qline/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "qline/chain.hpp"
#include "qline/correlation.hpp"
#include "qline/errors.hpp"
#include "qline/heterodyne.hpp"
#include "qline/scattering.hpp"

namespace qline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("file_hash: cannot open " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (f) {
    f.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

struct Emitter {
  fs::path dir;
  std::vector<std::string> files;

  std::ofstream open(const std::string& name) {
    fs::create_directories(dir);
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot open output file " + (dir / name).string());
    f.precision(12);
    files.push_back(name);
    return f;
  }
};

void write_scatter_csv(std::ostream& os, const AtomParams& atom,
                       const std::vector<double>& dbm_list, double bw_mhz) {
  os << "power_dbm,N,T,R,elastic_frac,inelastic_in_band_frac,g1,bw_mhz\n";
  for (double dbm : dbm_list) {
    DriveSpec d = DriveSpec::resonant(atom, dbm);
    double bw_hz = bw_mhz > 0.0 ? bw_mhz * 1e6 : full_band;
    ScatterResult s = transmittance(atom, d, bw_hz);
    CoherenceReport c = elastic_vs_total_power(atom, d, bw_hz);
    os << dbm << "," << d.n_photons << "," << s.transmittance << "," << s.reflectance << ","
       << s.elastic_frac << "," << s.inelastic_in_band_frac << "," << c.g1 << ","
       << (bw_mhz > 0.0 ? bw_mhz : 0.0) << "\n";
  }
}

std::vector<double> default_powers(const ExperimentConfig& cfg,
                                   std::initializer_list<double> fallback) {
  return cfg.power_dbm.empty() ? std::vector<double>(fallback) : cfg.power_dbm;
}

void run_fig1c(const ExperimentConfig& cfg, Emitter& em) {
  std::vector<double> dbm = cfg.power_dbm;
  if (dbm.empty())
    for (double p = -145.0; p <= -100.0 + 1e-9; p += 1.0) dbm.push_back(p);
  auto f = em.open("fig1c_transmittance.csv");
  write_scatter_csv(f, cfg.atom(), dbm, cfg.bw_mhz.front());
}

void run_fig2a(const ExperimentConfig& cfg, Emitter& em) {
  ChainConfig chain = cfg.chain;
  auto taus = cfg.tau_grid_ns();
  double duration = double(cfg.samples) / chain.sample_rate;
  // Thermal source well above the amplifier noise floor.
  double pth = 20.0 * (chain.noise_power_w(0) + chain.noise_power_w(1));

  for (double bw : cfg.bw_mhz) {
    chain.bw_mhz = bw;
    chain.rng_seed = stream_seed(cfg.seed, "fig2a-thermal");
    VoltageRecord rec = synthesize_reference(SourceKind::thermal, pth, chain, duration);
    chain.rng_seed = stream_seed(cfg.seed, "fig2a-noise");
    VoltageRecord noise = synthesize_reference(SourceKind::vacuum, 0.0, chain, duration);
    EstimatorOutput est = estimate_g2(rec, noise, bw, taus);
    CorrelationTrace closed = g2_reference(ReferenceKind::thermal, bw, taus);
    std::ostringstream name;
    name << "fig2a_thermal_bw" << bw << ".csv";
    auto f = em.open(name.str());
    f << "tau_ns,g2,stderr,g2_closed_form\n";
    for (size_t i = 0; i < taus.size(); ++i)
      f << taus[i] << "," << est.trace.g2[i] << "," << est.trace.stderr_g2[i] << ","
        << closed.g2[i] << "\n";
  }

  chain.bw_mhz = cfg.bw_mhz.front();
  chain.rng_seed = stream_seed(cfg.seed, "fig2a-coherent");
  VoltageRecord rec = synthesize_reference(SourceKind::coherent, pth, chain, duration);
  chain.rng_seed = stream_seed(cfg.seed, "fig2a-noise");
  VoltageRecord noise = synthesize_reference(SourceKind::vacuum, 0.0, chain, duration);
  EstimatorOutput est = estimate_g2(rec, noise, chain.bw_mhz, taus);
  auto f = em.open("fig2a_coherent.csv");
  f << "tau_ns,g2,stderr,g2_closed_form\n";
  for (size_t i = 0; i < taus.size(); ++i)
    f << taus[i] << "," << est.trace.g2[i] << "," << est.trace.stderr_g2[i] << ",1\n";
}

void theory_traces(const ExperimentConfig& cfg, Emitter& em, Port port,
                   const std::vector<double>& dbm_list, const std::vector<double>& bw_list,
                   const std::string& stem) {
  AtomParams atom = cfg.atom();
  auto taus = cfg.tau_grid_ns();
  for (double dbm : dbm_list) {
    DriveSpec d = DriveSpec::resonant(atom, dbm);
    for (double bw : bw_list) {
      CorrelationTrace t =
          g2_filtered(atom, d, port, bw, taus, 12, cfg.thermal_occupation());
      t = apply_trigger_jitter(t);
      std::ostringstream name;
      name << stem << "_p" << dbm << "_bw" << bw << ".csv";
      auto f = em.open(name.str());
      write_trace_csv(f, t);
    }
  }
}

void run_fig2b(const ExperimentConfig& cfg, Emitter& em) {
  auto dbm = default_powers(cfg, {-129.0, -126.0, -123.0, -117.0});
  theory_traces(cfg, em, Port::transmission, dbm, {cfg.bw_mhz.front()}, "fig2b_transmitted");
  // Inset: g2(0) vs power.
  AtomParams atom = cfg.atom();
  auto f = em.open("fig2b_inset_g2zero.csv");
  f << "power_dbm,N,g2_zero\n";
  auto taus = cfg.tau_grid_ns();
  for (double p = -132.0; p <= -111.0 + 1e-9; p += 3.0) {
    DriveSpec d = DriveSpec::resonant(atom, p);
    CorrelationTrace t = g2_filtered(atom, d, Port::transmission, cfg.bw_mhz.front(), taus, 12,
                                     cfg.thermal_occupation());
    t = apply_trigger_jitter(t);
    f << p << "," << d.n_photons << "," << t.at_zero() << "\n";
  }
}

void run_fig2c(const ExperimentConfig& cfg, Emitter& em) {
  auto dbm = default_powers(cfg, {-132.0, -129.0});
  theory_traces(cfg, em, Port::reflection, dbm, {cfg.bw_mhz.front()}, "fig2c_reflected");
}

void run_fig2d(const ExperimentConfig& cfg, Emitter& em) {
  std::vector<double> bws = cfg.bw_mhz.size() > 1
                                ? cfg.bw_mhz
                                : std::vector<double>{55.0, 20.0, 10.0, 5.0};
  auto dbm = default_powers(cfg, {-131.0});
  theory_traces(cfg, em, Port::reflection, {dbm.front()}, bws, "fig2d_reflected");
}

void run_fig3b(const ExperimentConfig& cfg, Emitter& em) {
  AtomParams atom = cfg.atom();
  std::vector<double> dbm = cfg.power_dbm;
  if (dbm.empty())
    for (double p = -140.0; p <= -105.0 + 1e-9; p += 1.0) dbm.push_back(p);
  for (double bw : cfg.bw_mhz) {
    std::ostringstream name;
    name << "fig3b_power_bw" << bw << ".csv";
    auto f = em.open(name.str());
    f << "power_dbm,N,elastic_power_w,total_power_w,g1,bw_mhz\n";
    for (double p : dbm) {
      DriveSpec d = DriveSpec::resonant(atom, p);
      CoherenceReport c = elastic_vs_total_power(atom, d, bw * 1e6);
      f << p << "," << d.n_photons << "," << c.elastic_power_w << "," << c.total_power_w << ","
        << c.g1 << "," << bw << "\n";
    }
  }
}

void run_spectrum(const ExperimentConfig& cfg, Emitter& em) {
  AtomParams atom = cfg.atom();
  auto dbm = default_powers(cfg, {DriveSpec::from_rabi(atom, 5.0 * atom.gamma10).power_dbm});
  for (double p : dbm) {
    DriveSpec d = DriveSpec::resonant(atom, p);
    double span = 2.0 * std::max(d.omega_rabi, atom.gamma10) + 10.0 * atom.gamma10;
    std::vector<double> grid;
    for (int k = 0; k <= 2000; ++k)
      grid.push_back(atom.omega01 - span + 2.0 * span * k / 2000.0);
    MollowSpectrum spec = mollow_spectrum(atom, d, grid);
    std::ostringstream name;
    name << "spectrum_p" << p << ".csv";
    auto f = em.open(name.str());
    f << "# elastic_weight=" << spec.elastic_weight
      << " total_inelastic=" << spec.total_inelastic << " fit_ok=" << spec.fit_ok << "\n";
    if (spec.fit_ok)
      for (const auto& pk : spec.peaks)
        f << "# peak center_ghz=" << units::rad_to_ghz(pk.center)
          << " hwhm_mhz=" << units::rad_to_mhz(pk.hwhm) << " weight=" << pk.weight << "\n";
    f << "detuning_mhz,spectral_density\n";
    for (size_t i = 0; i < grid.size(); ++i)
      f << units::rad_to_mhz(grid[i] - d.omega_p) << "," << spec.values[i] << "\n";
  }
}

void run_custom(const ExperimentConfig& cfg, Emitter& em) {
  if (cfg.power_dbm.empty())
    throw ConfigError("custom experiment needs a non-empty power sweep");
  theory_traces(cfg, em, cfg.port, cfg.power_dbm, cfg.bw_mhz, "custom_g2");
  auto f = em.open("custom_scattering.csv");
  write_scatter_csv(f, cfg.atom(), cfg.power_dbm, cfg.bw_mhz.front());
}

const std::map<std::string, void (*)(const ExperimentConfig&, Emitter&)>& experiment_table() {
  static const std::map<std::string, void (*)(const ExperimentConfig&, Emitter&)> table = {
      {"fig1c", run_fig1c},   {"fig2a", run_fig2a},     {"fig2b", run_fig2b},
      {"fig2c", run_fig2c},   {"fig2d", run_fig2d},     {"fig3b", run_fig3b},
      {"spectrum", run_spectrum}, {"custom", run_custom}};
  return table;
}

void write_error_record(const fs::path& dir, const std::string& experiment,
                        const std::string& kind, const std::string& message) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream f(dir / "error.json");
  if (!f) return;
  json rec = {{"experiment", experiment}, {"error", kind}, {"message", message}};
  f << rec.dump(2) << "\n";
}

} // namespace

bool known_experiment(const std::string& name) { return experiment_table().count(name) > 0; }

int run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  auto it = experiment_table().find(name);
  if (it == experiment_table().end()) {
    write_error_record(cfg.out_dir, name, "config", "unknown experiment '" + name + "'");
    return exit_config_error;
  }
  Emitter em{fs::path(cfg.out_dir), {}};
  auto t0 = std::chrono::steady_clock::now();
  try {
    it->second(cfg, em);
  } catch (const ConfigError& e) {
    write_error_record(cfg.out_dir, name, "config", e.what());
    return exit_config_error;
  } catch (const std::exception& e) {
    write_error_record(cfg.out_dir, name, "numerical", e.what());
    return exit_numeric_error;
  }
  double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["experiment"] = name;
  manifest["seed"] = cfg.seed;
  manifest["runtime_s"] = runtime;
  manifest["hash_algorithm"] = "fnv1a-64";
  manifest["inputs"] = config_echo(cfg);
  json files = json::array();
  for (const std::string& f : em.files)
    files.push_back({{"name", f}, {"hash", file_hash((em.dir / f).string())}});
  manifest["files"] = files;
  std::ofstream mf(em.dir / "manifest.json");
  mf << manifest.dump(2) << "\n";
  return exit_ok;
}

} // namespace qline
