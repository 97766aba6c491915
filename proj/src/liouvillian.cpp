#include "qline/liouvillian.hpp"

#include <cmath>

#include "qline/errors.hpp"
#include "qline/solvers.hpp"

namespace qline {

double Liouvillian::trace_preservation_defect() const {
  // vec(I)^T L must vanish (row sums against the identity pattern).
  CVec id = ops::vec(Mat::Identity(dim, dim));
  double scale = generator.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (id.transpose() * generator).cwiseAbs().maxCoeff() / scale;
}

Liouvillian make_liouvillian(const Mat& hamiltonian, const std::vector<Mat>& jumps,
                             double frame_freq) {
  const int d = int(hamiltonian.rows());
  const Mat id = Mat::Identity(d, d);
  Mat gen = -iu * (ops::kron(id, hamiltonian) - ops::kron(hamiltonian.transpose(), id));
  for (const Mat& j : jumps) {
    Mat jdj = j.adjoint() * j;
    gen += ops::kron(j.conjugate(), j);
    gen -= 0.5 * ops::kron(id, jdj);
    gen -= 0.5 * ops::kron(jdj.transpose(), id);
  }
  return Liouvillian{d, std::move(gen), frame_freq};
}

namespace {

void check_rwa(const AtomParams& atom, const DriveSpec& drive, const AtomBathOptions& opts) {
  double delta = drive.detuning(atom);
  if (!opts.allow_beyond_rwa && std::abs(delta) > atom.omega01 / 10.0)
    throw RwaViolation("drive detuning " + std::to_string(delta / units::two_pi * 1e-6) +
                       " MHz exceeds omega01/10; rotating-wave treatment invalid "
                       "(set allow_beyond_rwa to override)");
}

Mat atom_hamiltonian(const AtomParams& atom, const DriveSpec& drive) {
  double delta = drive.detuning(atom);
  return -delta * ops::number_tls() +
         0.5 * drive.omega_rabi * (ops::sigma_plus() + ops::sigma_minus());
}

void atom_jumps(const AtomParams& atom, const AtomBathOptions& opts, std::vector<Mat>& jumps) {
  double nb = opts.thermal_occupation;
  if (nb < 0.0) throw std::invalid_argument("thermal_occupation must be >= 0");
  jumps.push_back(std::sqrt(atom.gamma10 * (1.0 + nb)) * ops::sigma_minus());
  if (nb > 0.0) jumps.push_back(std::sqrt(atom.gamma10 * nb) * ops::sigma_plus());
  if (atom.gamma_phi > 0.0) jumps.push_back(std::sqrt(0.5 * atom.gamma_phi) * ops::sigma_z());
}

} // namespace

Liouvillian build_atom_liouvillian(const AtomParams& atom, const DriveSpec& drive,
                                   const AtomBathOptions& opts) {
  check_rwa(atom, drive, opts);
  std::vector<Mat> jumps;
  atom_jumps(atom, opts, jumps);
  return make_liouvillian(atom_hamiltonian(atom, drive), jumps, drive.omega_p);
}

CascadedSystem build_cascaded_liouvillian(const AtomParams& atom, const DriveSpec& drive,
                                          const FilterMode& filter, Port port,
                                          const AtomBathOptions& opts) {
  check_rwa(atom, drive, opts);
  const int nf = filter.n_max;
  const int dim = 2 * nf;
  const Mat id2 = Mat::Identity(2, 2);
  const Mat idf = Mat::Identity(nf, nf);
  const Mat sm = ops::kron(ops::sigma_minus(), idf);
  const Mat sz = ops::kron(ops::sigma_z(), idf);
  const Mat a = ops::kron(id2, ops::destroy(nf));

  const double root_half_gamma = std::sqrt(0.5 * atom.gamma10);
  // Carrier amplitude in the port operator; phase fixed by the H drive
  // convention so that transmission interferes destructively on resonance.
  Cx alpha = (port == Port::transmission) ? iu * std::sqrt(drive.photon_flux) : Cx(0.0);

  // Classical displacement of the filter: cancels the mean steady field so
  // the truncation only carries fluctuations.
  Liouvillian atom_L = build_atom_liouvillian(atom, drive, opts);
  Cx s_ss = steady_state(atom_L).expect(ops::sigma_minus());
  double rk = std::sqrt(filter.kappa);
  Cx beta = -(2.0 / rk) * (alpha + root_half_gamma * s_ss);

  const Mat joint_id = Mat::Identity(dim, dim);
  Mat port_op = root_half_gamma * sm;
  Mat a_full = a + beta * joint_id;

  // Coherent drives carried entirely by the Hamiltonian: the atom sees the
  // full Rabi term and the filter the full carrier, so the port jump holds
  // no coherent amplitude and the thermal terms below stay well formed.
  Mat h = ops::kron(atom_hamiltonian(atom, drive), idf);
  h += iu * rk * (std::conj(alpha) * a_full - alpha * a_full.adjoint());
  // Sign fixes the direction: atom output drives the filter, giving
  // d<a>/dt = -(kappa/2)<a> - sqrt(kappa) (alpha + <c1>).
  h += 0.5 * iu * rk * (port_op.adjoint() * a_full - a_full.adjoint() * port_op);

  double nb = opts.thermal_occupation;
  std::vector<Mat> jumps;
  // Shared line port at occupation nb: (nb+1) D[c1+c2] + nb D[(c1+c2)^dag].
  Mat cascade_op = port_op + rk * a_full;
  jumps.push_back(std::sqrt(1.0 + nb) * cascade_op);
  if (nb > 0.0) jumps.push_back(std::sqrt(nb) * Mat(cascade_op.adjoint()));
  // The line couples the atom symmetrically: Gamma10/2 feeds the filter
  // through the cascade port, the other half leaves through the unmonitored
  // direction at the same temperature.
  jumps.push_back(std::sqrt(0.5 * atom.gamma10 * (1.0 + nb)) * sm);
  if (nb > 0.0) jumps.push_back(std::sqrt(0.5 * atom.gamma10 * nb) * Mat(sm.adjoint()));
  if (atom.gamma_phi > 0.0) jumps.push_back(std::sqrt(0.5 * atom.gamma_phi) * sz);

  Mat top = Mat::Zero(dim, dim);
  top(nf - 1, nf - 1) = 1.0;
  top(2 * nf - 1, 2 * nf - 1) = 1.0;

  CascadedSystem sys;
  sys.liouvillian = make_liouvillian(h, jumps, drive.omega_p);
  sys.detected_field = a + beta * joint_id;
  sys.top_fock_proj = std::move(top);
  sys.displacement = beta;
  sys.n_max = nf;
  return sys;
}

CascadedSystem build_thermal_filter(const FilterMode& filter, double n_bar) {
  const int nf = filter.n_max;
  Mat a = ops::destroy(nf);
  std::vector<Mat> jumps;
  jumps.push_back(std::sqrt(filter.kappa * (1.0 + n_bar)) * a);
  if (n_bar > 0.0) jumps.push_back(std::sqrt(filter.kappa * n_bar) * a.adjoint());

  Mat top = Mat::Zero(nf, nf);
  top(nf - 1, nf - 1) = 1.0;

  CascadedSystem sys;
  sys.liouvillian = make_liouvillian(Mat::Zero(nf, nf), jumps, 0.0);
  sys.detected_field = a;
  sys.top_fock_proj = std::move(top);
  sys.displacement = 0.0;
  sys.n_max = nf;
  return sys;
}

} // namespace qline
