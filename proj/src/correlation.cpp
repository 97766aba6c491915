#include "qline/correlation.hpp"

#include <cmath>
#include <ostream>

#include "qline/errors.hpp"
#include "qline/liouvillian.hpp"
#include "qline/solvers.hpp"

namespace qline {

std::vector<double> default_tau_grid_ns(double step_ns, double max_ns) {
  std::vector<double> taus;
  for (double t = 0.0; t <= max_ns + 1e-9; t += step_ns) taus.push_back(t);
  return taus;
}

namespace {

std::vector<double> to_seconds(const std::vector<double>& tau_ns) {
  std::vector<double> out;
  out.reserve(tau_ns.size());
  for (double t : tau_ns) out.push_back(t * 1e-9);
  return out;
}

CorrelationTrace normalized_g2(const Liouvillian& L, const DensityOperator& rho_ss,
                               const Mat& field, const std::vector<double>& tau_ns) {
  Mat number = field.adjoint() * field;
  double flux = rho_ss.expect(number).real();
  if (flux < 1e-14)
    throw UndefinedTrace("g2: mean output flux " + std::to_string(flux) +
                         " too small to normalize");
  auto g = sandwich_correlator(L, rho_ss, number, field, to_seconds(tau_ns));
  CorrelationTrace trace;
  trace.tau_ns = tau_ns;
  trace.g2.reserve(g.size());
  for (Cx v : g) trace.g2.push_back(v.real() / (flux * flux));
  return trace;
}

} // namespace

CorrelationTrace g2_ideal(const AtomParams& atom, const DriveSpec& drive, Port port,
                          const std::vector<double>& tau_ns) {
  AtomBathOptions opts;
  opts.allow_beyond_rwa = true; // far-detuned coherent pass-through is a valid use
  Liouvillian L = build_atom_liouvillian(atom, drive, opts);
  DensityOperator rho = steady_state(L);

  Mat field = std::sqrt(0.5 * atom.gamma10) * ops::sigma_minus();
  if (port == Port::transmission)
    field += iu * std::sqrt(drive.photon_flux) * Mat::Identity(2, 2);

  CorrelationTrace trace = normalized_g2(L, rho, field, tau_ns);
  trace.port = port;
  trace.bw_mhz = 0.0;
  trace.power_dbm = drive.power_dbm;
  return trace;
}

CorrelationTrace g2_filtered(const AtomParams& atom, const DriveSpec& drive, Port port,
                             double bw_mhz, const std::vector<double>& tau_ns, int n_max,
                             double thermal_occupation) {
  if (!(bw_mhz > 0.0)) throw std::invalid_argument("g2_filtered: bw must be > 0");
  AtomBathOptions opts;
  opts.allow_beyond_rwa = true;
  opts.thermal_occupation = thermal_occupation;
  FilterMode filter = FilterMode::from_bandwidth_mhz(bw_mhz, n_max);
  CascadedSystem sys = build_cascaded_liouvillian(atom, drive, filter, port, opts);
  DensityOperator rho = steady_state(sys.liouvillian);

  double top = rho.expect(sys.top_fock_proj).real();
  if (top > 1e-3)
    throw TruncationOverflow("g2_filtered: top Fock population " + std::to_string(top) +
                             " at n_max = " + std::to_string(sys.n_max));

  CorrelationTrace trace = normalized_g2(sys.liouvillian, rho, sys.detected_field, tau_ns);
  trace.port = port;
  trace.bw_mhz = bw_mhz;
  trace.power_dbm = drive.power_dbm;
  return trace;
}

CorrelationTrace apply_trigger_jitter(const CorrelationTrace& trace) {
  const auto& tau = trace.tau_ns;
  if (tau.size() < 2) throw std::invalid_argument("apply_trigger_jitter: trace too short");
  double step = tau[1] - tau[0];
  for (size_t k = 1; k < tau.size(); ++k)
    if (std::abs(tau[k] - tau[k - 1] - step) > 1e-9 * std::max(1.0, step))
      throw std::invalid_argument("apply_trigger_jitter: grid must be uniform");
  double ratio = 10.0 / step;
  long shift = std::lround(ratio);
  if (shift < 1 || std::abs(ratio - double(shift)) > 1e-9)
    throw std::invalid_argument("apply_trigger_jitter: grid spacing must divide 10 ns");

  const long n = long(trace.g2.size());
  auto sample = [&](long i) {
    if (i < 0) i = -i;           // symmetric extension below tau = 0
    if (i >= n) i = n - 1;       // trace is flat (= 1) beyond the grid
    return trace.g2[size_t(i)];
  };
  CorrelationTrace out = trace;
  for (long i = 0; i < n; ++i)
    out.g2[size_t(i)] = (sample(i - shift) + sample(i) + sample(i + shift)) / 3.0;
  out.jitter_applied = true;
  return out;
}

CorrelationTrace g2_reference(ReferenceKind kind, double bw_mhz,
                              const std::vector<double>& tau_ns) {
  if (kind == ReferenceKind::thermal && !(bw_mhz > 0.0))
    throw std::invalid_argument("g2_reference: thermal reference needs bw > 0");
  CorrelationTrace trace;
  trace.tau_ns = tau_ns;
  trace.bw_mhz = kind == ReferenceKind::thermal ? bw_mhz : 0.0;
  for (double t : tau_ns) {
    double g = 1.0;
    if (kind == ReferenceKind::thermal)
      g += std::exp(-units::two_pi * bw_mhz * 1e6 * std::abs(t) * 1e-9);
    trace.g2.push_back(g);
  }
  return trace;
}

void write_trace_csv(std::ostream& os, const CorrelationTrace& trace) {
  os << "tau_ns,g2";
  bool have_se = !trace.stderr_g2.empty();
  if (have_se) os << ",stderr";
  os << ",port,bw_mhz,power_dbm,jitter\n";
  for (size_t i = 0; i < trace.tau_ns.size(); ++i) {
    os << trace.tau_ns[i] << "," << trace.g2[i];
    if (have_se) os << "," << trace.stderr_g2[i];
    os << "," << to_string(trace.port) << "," << trace.bw_mhz << "," << trace.power_dbm << ","
       << (trace.jitter_applied ? 1 : 0) << "\n";
  }
}

} // namespace qline
