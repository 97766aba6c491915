#include <iostream>

#include <CLI11.hpp>

#include "qline/errors.hpp"
#include "qline/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qline: scattering and photon statistics of a two-level atom in a 1D line"};

  std::string config_path, experiment = "custom", out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false;
  int threads = 0;
  double samples = 0.0;

  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--experiment", experiment,
                 "fig1c | fig2a | fig2b | fig2c | fig2d | fig3b | spectrum | custom");
  app.add_option("--out-dir", out_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides config)");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--samples", samples, "record length in samples (overrides config)");

  CLI11_PARSE(app, argc, argv);
  have_seed = seed_opt->count() > 0;

  qline::ExperimentConfig cfg;
  try {
    std::string echo;
    if (!config_path.empty())
      cfg = qline::validate_config(config_path, &echo);
    else
      echo = qline::config_echo(cfg);
    std::cerr << echo;
  } catch (const qline::ConfigError& e) {
    std::cerr << "config error:\n" << e.what();
    return qline::exit_config_error;
  }

  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (have_seed) {
    cfg.seed = seed;
    cfg.chain.rng_seed = seed;
  }
  if (threads > 0) cfg.threads = threads;
  if (samples > 0.0) cfg.samples = std::size_t(samples);

  if (!qline::known_experiment(experiment)) {
    std::cerr << "unknown experiment: " << experiment << "\n";
    return qline::exit_config_error;
  }
  int rc = qline::run_experiment(experiment, cfg);
  if (rc == qline::exit_ok)
    std::cerr << "wrote " << cfg.out_dir << "/manifest.json\n";
  else
    std::cerr << "failed (exit " << rc << "); see " << cfg.out_dir << "/error.json\n";
  return rc;
}
