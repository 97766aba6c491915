#include "qline/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "qline/errors.hpp"

namespace qline {

std::vector<double> ExperimentConfig::tau_grid_ns() const {
  std::vector<double> taus;
  for (double t = 0.0; t <= tau_max_ns + 1e-9; t += tau_step_ns) taus.push_back(t);
  return taus;
}

namespace {

struct Value {
  double number;
  std::string unit; // possibly empty
  int line;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Parser {
 public:
  void fail(int line, const std::string& msg) {
    errors_ += "line " + std::to_string(line) + ": " + msg + "\n";
  }

  void add(int line, const std::string& key, const std::string& rhs) {
    std::vector<Value> vals;
    std::stringstream ss(rhs);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        fail(line, "empty list element for '" + key + "'");
        return;
      }
      std::istringstream is(item);
      Value v;
      v.line = line;
      if (!(is >> v.number)) {
        fail(line, "expected a number in '" + item + "' for '" + key + "'");
        return;
      }
      is >> v.unit;
      std::string extra;
      if (is >> extra) {
        fail(line, "trailing junk '" + extra + "' for '" + key + "'");
        return;
      }
      vals.push_back(v);
    }
    if (vals.empty()) {
      fail(line, "no value for '" + key + "'");
      return;
    }
    values_[key] = vals;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  // Scalar with an expected unit (empty = dimensionless).
  double scalar(const std::string& key, const std::string& unit, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second.size() != 1) {
      fail(it->second[0].line, "'" + key + "' must be a single value");
      return fallback;
    }
    return convert(it->second[0], key, unit, fallback);
  }

  std::vector<double> list(const std::string& key, const std::string& unit) {
    std::vector<double> out;
    auto it = values_.find(key);
    if (it == values_.end()) return out;
    for (const Value& v : it->second) out.push_back(convert(v, key, unit, 0.0));
    return out;
  }

  std::string word(const std::string& key, const std::string& fallback, int* line = nullptr) {
    auto it = words_.find(key);
    if (it == words_.end()) return fallback;
    if (line) *line = it->second.second;
    return it->second.first;
  }

  void add_word(int line, const std::string& key, const std::string& rhs) {
    words_[key] = {rhs, line};
  }

  const std::string& errors() const { return errors_; }

  // Power values accept dBm or W and normalize to dBm.
  std::vector<double> power_dbm_list() {
    std::vector<double> out;
    auto it = values_.find("power");
    if (it == values_.end()) return out;
    for (const Value& v : it->second) {
      if (v.unit == "dBm" || v.unit == "dbm") {
        out.push_back(v.number);
      } else if (v.unit == "W") {
        if (v.number <= 0.0)
          fail(v.line, "power in watts must be > 0");
        else
          out.push_back(units::watts_to_dbm(v.number));
      } else if (v.unit == "mW") {
        if (v.number <= 0.0)
          fail(v.line, "power in milliwatts must be > 0");
        else
          out.push_back(units::watts_to_dbm(v.number * 1e-3));
      } else {
        fail(v.line, "power unit must be dBm, W or mW (got '" + v.unit + "')");
      }
    }
    return out;
  }

 private:
  double convert(const Value& v, const std::string& key, const std::string& unit,
                 double fallback) {
    static const std::vector<std::pair<std::string, double>> scales = {
        {"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0},
        {"s", 1.0},   {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9},
        {"K", 1.0},   {"mK", 1e-3}, {"dB", 1.0},  {"", 1.0}};
    auto factor = [&](const std::string& u) -> double {
      for (auto& [name, f] : scales)
        if (name == u) return f;
      return std::nan("");
    };
    if (v.unit.empty() && unit.empty()) return v.number;
    double fv = factor(v.unit), fu = factor(unit);
    // Units must be dimensionally compatible: same family by suffix class.
    auto family = [](const std::string& u) {
      if (u == "GHz" || u == "MHz" || u == "kHz" || u == "Hz") return 1;
      if (u == "s" || u == "ms" || u == "us" || u == "ns") return 2;
      if (u == "K" || u == "mK") return 3;
      if (u == "dB") return 4;
      return 0;
    };
    if (std::isnan(fv) || family(v.unit) != family(unit)) {
      fail(v.line, "'" + key + "' expects unit compatible with '" + unit + "' (got '" +
                       v.unit + "')");
      return fallback;
    }
    return v.number * fv / fu;
  }

  std::map<std::string, std::vector<Value>> values_;
  std::map<std::string, std::pair<std::string, int>> words_;
  std::string errors_;
};

bool is_word_key(const std::string& key) {
  return key == "port" || key == "out_dir" || key == "experiment";
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text, std::string* echo) {
  Parser p;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.fail(lineno, "expected 'key = value'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string rhs = trim(line.substr(eq + 1));
    if (key.empty() || rhs.empty()) {
      p.fail(lineno, "expected 'key = value'");
      continue;
    }
    if (is_word_key(key))
      p.add_word(lineno, key, rhs);
    else
      p.add(lineno, key, rhs);
  }

  // Environment overrides.
  auto env_override = [&p](const std::string& env, const std::string& key, bool word) {
    if (const char* v = std::getenv(env.c_str())) {
      if (word)
        p.add_word(0, key, v);
      else
        p.add(0, key, v);
    }
  };
  env_override("QLINE_SEED", "seed", false);
  env_override("QLINE_SAMPLES", "samples", false);
  env_override("QLINE_THREADS", "threads", false);
  env_override("QLINE_OUT_DIR", "out_dir", true);

  ExperimentConfig cfg;
  // Atom parameters: either the full device triple or none (device defaults).
  {
    const char* keys[3] = {"omega01", "gamma10", "gamma_phi"};
    int present = 0;
    for (const char* k : keys) present += p.has(k) ? 1 : 0;
    if (present > 0 && present < 3)
      for (const char* k : keys)
        if (!p.has(k)) p.fail(0, std::string("missing atom field '") + k + "'");
  }
  cfg.omega01_ghz = p.scalar("omega01", "GHz", cfg.omega01_ghz);
  cfg.gamma10_mhz = p.scalar("gamma10", "MHz", cfg.gamma10_mhz);
  cfg.gamma_phi_mhz = p.scalar("gamma_phi", "MHz", cfg.gamma_phi_mhz);

  cfg.power_dbm = p.power_dbm_list();
  if (p.has("n_photons")) {
    if (!cfg.power_dbm.empty()) {
      p.fail(0, "'power' and 'n_photons' are mutually exclusive");
    } else if (cfg.gamma10_mhz > 0.0 && cfg.omega01_ghz > 0.0) {
      AtomParams atom = AtomParams::from_ghz_mhz(cfg.omega01_ghz, cfg.gamma10_mhz,
                                                 std::max(cfg.gamma_phi_mhz, 0.0));
      for (double n : p.list("n_photons", ""))
        cfg.power_dbm.push_back(DriveSpec::from_photon_number(atom, n).power_dbm);
    }
  }

  int port_line = 0;
  std::string port = p.word("port", "reflected", &port_line);
  if (port == "reflected" || port == "reflection")
    cfg.port = Port::reflection;
  else if (port == "transmitted" || port == "transmission")
    cfg.port = Port::transmission;
  else
    p.fail(port_line, "port must be 'reflected' or 'transmitted'");

  auto bws = p.list("bw", "MHz");
  if (!bws.empty()) cfg.bw_mhz = bws;

  cfg.chain.sample_rate = p.scalar("sample_rate", "Hz", cfg.chain.sample_rate);
  cfg.chain.bw_mhz = cfg.bw_mhz.front();
  cfg.chain.carrier_ghz = cfg.omega01_ghz;
  cfg.chain.gain_db = p.scalar("gain", "dB", cfg.chain.gain_db);
  double tn = p.scalar("noise_temp", "K", cfg.chain.noise_temp_k[0]);
  cfg.chain.noise_temp_k[0] = cfg.chain.noise_temp_k[1] = tn;
  cfg.chain.terminator_temp_mk = p.scalar("terminator_temp", "mK", cfg.chain.terminator_temp_mk);
  cfg.chain.jitter_samples = int(p.scalar("jitter", "", cfg.chain.jitter_samples));
  cfg.chain.jitter_block =
      std::size_t(p.scalar("jitter_block", "", double(cfg.chain.jitter_block)));

  cfg.samples = std::size_t(p.scalar("samples", "", double(cfg.samples)));
  cfg.threads = int(p.scalar("threads", "", cfg.threads));
  cfg.n_trajectories = int(p.scalar("trajectories", "", cfg.n_trajectories));
  cfg.tau_step_ns = p.scalar("tau_step", "ns", cfg.tau_step_ns);
  cfg.tau_max_ns = p.scalar("tau_max", "ns", cfg.tau_max_ns);
  cfg.temperature_mk = p.scalar("temperature", "mK", cfg.temperature_mk);
  cfg.seed = std::uint64_t(p.scalar("seed", "", double(cfg.seed)));
  cfg.chain.rng_seed = cfg.seed;
  cfg.out_dir = p.word("out_dir", cfg.out_dir);

  // Range validation.
  std::string range_errors;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) range_errors += "config: " + msg + "\n";
  };
  check(cfg.omega01_ghz > 0.0, "omega01 must be > 0");
  check(cfg.gamma10_mhz > 0.0, "gamma10 must be > 0 (missing or invalid 'gamma10')");
  check(cfg.gamma_phi_mhz >= 0.0, "gamma_phi must be >= 0");
  for (double bw : cfg.bw_mhz) check(bw > 0.0, "bw entries must be > 0");
  check(cfg.tau_step_ns > 0.0, "tau_step must be > 0");
  check(cfg.temperature_mk >= 0.0 && cfg.temperature_mk <= 1000.0,
        "temperature out of validated range [0, 1000] mK");
  check(cfg.tau_max_ns >= cfg.tau_step_ns, "tau_max must cover at least one step");
  check(cfg.samples >= 10000, "samples must be >= 1e4");
  check(cfg.n_trajectories >= 1, "trajectories must be >= 1");
  for (double dbm : cfg.power_dbm)
    check(dbm > -200.0 && dbm < 0.0, "power out of validated range (-200, 0) dBm");

  if (!p.errors().empty() || !range_errors.empty())
    throw ConfigError(p.errors() + range_errors);

  if (echo) *echo = config_echo(cfg);
  return cfg;
}

ExperimentConfig validate_config(const std::string& path, std::string* echo) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), echo);
}

std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(10);
  AtomParams atom = cfg.atom();
  os << "atom: omega01/2pi = " << cfg.omega01_ghz << " GHz, gamma10/2pi = " << cfg.gamma10_mhz
     << " MHz, gamma_phi/2pi = " << cfg.gamma_phi_mhz << " MHz\n";
  for (double dbm : cfg.power_dbm) {
    DriveSpec d = DriveSpec::resonant(atom, dbm);
    os << "sweep: P = " << dbm << " dBm -> N = " << d.n_photons
       << ", Omega_p/2pi = " << units::rad_to_mhz(d.omega_rabi) << " MHz\n";
  }
  return os.str();
}

} // namespace qline
