#ifndef QLINE_SOLVERS_HPP
#define QLINE_SOLVERS_HPP

#include <map>
#include <vector>

#include "qline/density.hpp"
#include "qline/liouvillian.hpp"

namespace qline {

// Stationary state of L, by null-space solve with the trace constraint.
// Throws DegenerateSteadyState when the null space is not one-dimensional.
DensityOperator steady_state(const Liouvillian& L);

// rho(t) = exp(L t)[rho0] by adaptive Dormand-Prince integration,
// relative tolerance 1e-9.
DensityOperator evolve(const Liouvillian& L, const DensityOperator& rho0, double t);

// Caches exp(L dt) per distinct step so uniform tau grids cost one
// matrix exponential plus one matrix-vector product per point.
class Propagator {
 public:
  explicit Propagator(const Liouvillian& L) : L_(&L) {}

  CVec apply(const CVec& v, double dt);

 private:
  const Liouvillian* L_;
  std::map<double, Mat> cache_;
};

// <A(tau) B(0)>_ss = Tr[A exp(L tau)(B rho_ss)] over a monotone tau grid.
std::vector<Cx> two_time_correlator(const Liouvillian& L, const Mat& A, const Mat& B,
                                    const std::vector<double>& tau_grid);

// Normally-ordered fourth-moment pattern:
// <B+(0) M(tau) B(0)>_ss = Tr[M exp(L tau)(B rho_ss B+)].
std::vector<Cx> sandwich_correlator(const Liouvillian& L, const Mat& mid, const Mat& B,
                                    const std::vector<double>& tau_grid);

// Same seeds, explicit steady state (lets callers reuse / post-check it).
std::vector<Cx> two_time_correlator(const Liouvillian& L, const DensityOperator& rho_ss,
                                    const Mat& A, const Mat& B,
                                    const std::vector<double>& tau_grid);
std::vector<Cx> sandwich_correlator(const Liouvillian& L, const DensityOperator& rho_ss,
                                    const Mat& mid, const Mat& B,
                                    const std::vector<double>& tau_grid);

} // namespace qline

#endif
