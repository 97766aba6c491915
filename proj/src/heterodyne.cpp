#include "qline/heterodyne.hpp"

#include <cmath>
#include <future>
#include <random>

#include <Eigen/Dense>

#include "qline/errors.hpp"
#include "qline/liouvillian.hpp"
#include "qline/operators.hpp"
#include "qline/solvers.hpp"

namespace qline {

namespace {

using M2 = Eigen::Matrix2cd;
using Cxd = std::complex<double>;

struct SmeContext {
  M2 hamiltonian;
  M2 collapse;      // full emission sqrt(Gamma) sigma-  (plus thermal pump if any)
  M2 pump;          // sqrt(Gamma n_bar) sigma+, zero when cold
  M2 deph;          // sqrt(Gamma_phi/2) sigma_z, zero when absent
  M2 monitored;     // per-channel innovation operator, sqrt(Gamma/4) sigma-
  Cxd carrier;      // per-channel c-number current offset
  M2 rho0;
};

M2 dissipator(const M2& j, const M2& rho) {
  M2 jd = j.adjoint();
  M2 jdj = jd * j;
  return j * rho * jd - 0.5 * (jdj * rho + rho * jdj);
}

M2 drift(const SmeContext& c, const M2& rho) {
  M2 d = -iu * (c.hamiltonian * rho - rho * c.hamiltonian);
  d += dissipator(c.collapse, rho);
  if (c.pump.squaredNorm() > 0.0) d += dissipator(c.pump, rho);
  if (c.deph.squaredNorm() > 0.0) d += dissipator(c.deph, rho);
  return d;
}

// One trajectory of quantum-limited heterodyne current samples, units
// sqrt(photon flux). A c-number offset in the monitored operator shifts
// the current but not the conditional state, so the carrier is added to
// the output only.
void run_trajectory(const SmeContext& ctx, double dt, int substeps, std::size_t n_samples,
                    std::size_t burn_samples, std::uint64_t seed, Cxd* out1, Cxd* out2) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double root_half_dt = std::sqrt(0.5 * dt);
  const double t_sample = dt * substeps;

  M2 rho = ctx.rho0;
  for (std::size_t s = 0; s < burn_samples + n_samples; ++s) {
    Cxd z1 = 0.0, z2 = 0.0;
    for (int k = 0; k < substeps; ++k) {
      Cxd e = (ctx.monitored * rho).trace();
      Cxd dxi1{root_half_dt * gauss(eng), root_half_dt * gauss(eng)};
      Cxd dxi2{root_half_dt * gauss(eng), root_half_dt * gauss(eng)};

      M2 innov = ctx.monitored * rho - e * rho;
      M2 next = rho + dt * drift(ctx, rho);
      next += innov * std::conj(dxi1) + M2(innov.adjoint()) * dxi1;
      next += innov * std::conj(dxi2) + M2(innov.adjoint()) * dxi2;

      Cxd tr = next.trace();
      if (std::abs(tr - 1.0) > 1e-3)
        throw SolverError("synthesize_atom_output: trajectory norm drift " +
                          std::to_string(std::abs(tr - 1.0)) + " per step; reduce dt");
      rho = next / tr;

      z1 += (e + ctx.carrier) * dt + dxi1;
      z2 += (e + ctx.carrier) * dt + dxi2;
    }
    if (s >= burn_samples) {
      out1[s - burn_samples] = z1 / t_sample;
      out2[s - burn_samples] = z2 / t_sample;
    }
  }
}

} // namespace

VoltageRecord synthesize_atom_output(const AtomParams& atom, const DriveSpec& drive, Port port,
                                     const ChainConfig& cfg, double duration_s,
                                     int n_trajectories, const SmeOptions& opts) {
  cfg.validate();
  if (n_trajectories < 1)
    throw std::invalid_argument("synthesize_atom_output: need at least one trajectory");
  const std::size_t n_total = std::size_t(duration_s * cfg.sample_rate);
  if (n_total < std::size_t(n_trajectories))
    throw std::invalid_argument("synthesize_atom_output: record shorter than trajectory count");

  AtomBathOptions bopts;
  bopts.allow_beyond_rwa = true;
  bopts.thermal_occupation = opts.thermal_occupation;
  DensityOperator rho_ss = steady_state(build_atom_liouvillian(atom, drive, bopts));

  const double delta = drive.detuning(atom);
  const double nb = opts.thermal_occupation;
  SmeContext ctx;
  ctx.hamiltonian = M2::Zero();
  ctx.hamiltonian(1, 1) = -delta;
  ctx.hamiltonian(0, 1) = ctx.hamiltonian(1, 0) = 0.5 * drive.omega_rabi;
  ctx.collapse = M2::Zero();
  ctx.collapse(0, 1) = std::sqrt(atom.gamma10 * (1.0 + nb));
  ctx.pump = M2::Zero();
  if (nb > 0.0) ctx.pump(1, 0) = std::sqrt(atom.gamma10 * nb);
  ctx.deph = M2::Zero();
  if (atom.gamma_phi > 0.0) {
    ctx.deph(0, 0) = -std::sqrt(0.5 * atom.gamma_phi);
    ctx.deph(1, 1) = std::sqrt(0.5 * atom.gamma_phi);
  }
  // Monitored port emission sqrt(Gamma/2) sigma-, halved again by the
  // splitter: sqrt(Gamma/4) per channel.
  ctx.monitored = M2::Zero();
  ctx.monitored(0, 1) = std::sqrt(0.25 * atom.gamma10);
  ctx.carrier = port == Port::transmission
                    ? iu * std::sqrt(0.5 * drive.photon_flux)
                    : Cxd(0.0);
  ctx.rho0 = rho_ss.matrix;

  const double rate =
      atom.gamma10 * (1.0 + nb) + atom.gamma_phi + drive.omega_rabi + std::abs(delta);
  const double t_sample = 1.0 / cfg.sample_rate;
  int substeps = opts.substeps;
  if (substeps <= 0) substeps = std::max(1, int(std::ceil(rate * t_sample / opts.max_rate_step)));
  const double dt = t_sample / substeps;

  const std::size_t per_traj = n_total / std::size_t(n_trajectories);
  const std::size_t burn =
      std::size_t(std::ceil(opts.burn_in_lifetimes / atom.gamma10 * cfg.sample_rate)) + 1;

  std::vector<Cxd> q1(per_traj * std::size_t(n_trajectories));
  std::vector<Cxd> q2(q1.size());
  {
    std::vector<std::future<void>> futs;
    for (int t = 0; t < n_trajectories; ++t) {
      std::uint64_t seed = stream_seed(cfg.rng_seed, "sme-traj-" + std::to_string(t));
      Cxd* o1 = q1.data() + std::size_t(t) * per_traj;
      Cxd* o2 = q2.data() + std::size_t(t) * per_traj;
      futs.push_back(std::async(std::launch::async, [&ctx, dt, substeps, per_traj, burn, seed,
                                                     o1, o2] {
        run_trajectory(ctx, dt, substeps, per_traj, burn, seed, o1, o2);
      }));
    }
    for (auto& f : futs) f.get();
  }

  VoltageRecord rec;
  rec.sample_rate = cfg.sample_rate;
  rec.gain_linear = cfg.gain_linear();
  rec.seed = cfg.rng_seed;
  rec.source = std::string("atom-") + to_string(port);
  rec.ch1.resize(q1.size());
  rec.ch2.resize(q2.size());

  std::mt19937_64 amp_eng1(stream_seed(cfg.rng_seed, "amp1"));
  std::mt19937_64 amp_eng2(stream_seed(cfg.rng_seed, "amp2"));
  std::mt19937_64 term_eng(stream_seed(cfg.rng_seed, "terminator"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto cnoise = [&](std::mt19937_64& e, double var) {
    double s = std::sqrt(0.5 * var);
    return Cxd{s * gauss(e), s * gauss(e)};
  };
  const double root_g = std::sqrt(cfg.gain_linear());
  const double root_hw = std::sqrt(units::hbar * drive.omega_p);
  const double pn1 = cfg.noise_power_w(0), pn2 = cfg.noise_power_w(1);
  const double nterm = units::thermal_occupation(drive.omega_p, cfg.terminator_temp_mk * 1e-3);
  const double pterm = nterm * units::hbar * drive.omega_p * cfg.sample_rate;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < q1.size(); ++k) {
    Cxd w = pterm > 0.0 ? cnoise(term_eng, pterm) : Cxd(0.0);
    rec.ch1[k] = root_g * (root_hw * q1[k] + w * inv_sqrt2 + cnoise(amp_eng1, pn1));
    rec.ch2[k] = root_g * (root_hw * q2[k] - w * inv_sqrt2 + cnoise(amp_eng2, pn2));
  }
  return rec;
}

} // namespace qline
