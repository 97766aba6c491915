#include "qline/solvers.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "qline/errors.hpp"

namespace qline {

namespace {

DensityOperator normalize_hermitian(const CVec& v, int dim) {
  Mat rho = ops::unvec(v, dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  Cx tr = rho.trace();
  if (std::abs(tr) < 1e-300) throw SolverError("steady_state: null vector has zero trace");
  rho /= tr;
  return DensityOperator(dim, std::move(rho));
}

} // namespace

DensityOperator steady_state(const Liouvillian& L) {
  const int d = L.dim;
  const int n = d * d;
  const double scale = L.generator.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw DegenerateSteadyState("steady_state: zero generator");

  CVec sol;
  if (n <= 256) {
    // Small systems: full SVD, with an explicit uniqueness check on the
    // second-smallest singular value.
    Eigen::BDCSVD<Mat> svd(L.generator, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (n >= 2 && sv(n - 2) < 1e-8 * sv(0))
      throw DegenerateSteadyState("steady_state: null space is degenerate (sigma_{n-1} = " +
                                  std::to_string(sv(n - 2) / sv(0)) + " relative)");
    sol = svd.matrixV().col(n - 1);
  } else {
    // Large systems: replace one equation by the trace constraint and solve
    // directly. Trace preservation makes exactly the diagonal rows linearly
    // dependent, so only a diagonal row may be dropped; pick the weakest.
    Mat A = L.generator / scale;
    CVec rhs = CVec::Zero(n);
    int row = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < d; ++k) {
      double s = A.row(k * d + k).cwiseAbs().sum();
      if (s < best) {
        best = s;
        row = k * d + k;
      }
    }
    A.row(row).setZero();
    for (int k = 0; k < d; ++k) A(row, k * d + k) = 1.0;
    rhs(row) = 1.0;
    Eigen::PartialPivLU<Mat> lu(A);
    sol = lu.solve(rhs);
    // Uniqueness probe: the homogeneous residual of the solution must be
    // tiny; a degenerate kernel shows up as an ill-conditioned solve.
    if (!sol.allFinite()) throw DegenerateSteadyState("steady_state: singular solve");
  }

  DensityOperator rho = normalize_hermitian(sol, d);
  double resid = (L.generator * ops::vec(rho.matrix)).norm() / scale;
  if (resid > 1e-9)
    throw SolverError("steady_state: residual " + std::to_string(resid) + " too large");
  return rho;
}

namespace {

// Dormand-Prince 5(4) on the vectorized state.
struct Rk45 {
  const Mat* gen;
  CVec deriv(const CVec& v) const { return (*gen) * v; }

  // One attempted step; returns error estimate norm and writes the 5th
  // order result into out.
  double step(const CVec& v, double h, CVec& out) const {
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    CVec k1 = deriv(v);
    CVec k2 = deriv(v + h * a21 * k1);
    CVec k3 = deriv(v + h * (a31 * k1 + a32 * k2));
    CVec k4 = deriv(v + h * (a41 * k1 + a42 * k2 + a43 * k3));
    CVec k5 = deriv(v + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    CVec k6 = deriv(v + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    out = v + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    CVec k7 = deriv(out);
    CVec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    return err.norm();
  }
};

} // namespace

DensityOperator evolve(const Liouvillian& L, const DensityOperator& rho0, double t) {
  if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
  if (t == 0.0) return rho0;

  const double rtol = 1e-9;
  const double scale = std::max(L.generator.cwiseAbs().maxCoeff(), 1e-300);
  CVec v = ops::vec(rho0.matrix);
  Rk45 rk{&L.generator};

  double time = 0.0;
  double h = std::min(t, 0.1 / scale);
  CVec next(v.size());
  while (time < t) {
    h = std::min(h, t - time);
    double err = rk.step(v, h, next);
    double tol = rtol * std::max(v.norm(), next.norm()) + 1e-300;
    if (err <= tol) {
      time += h;
      v.swap(next);
    }
    double factor = 0.9 * std::pow(tol / std::max(err, 1e-300), 0.2);
    h *= std::clamp(factor, 0.1, 5.0);
    if (h < 1e-15 * t)
      throw SolverError("evolve: step size underflow at t = " + std::to_string(time));
  }

  Mat rho = ops::unvec(v, L.dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityOperator(L.dim, std::move(rho));
}

CVec Propagator::apply(const CVec& v, double dt) {
  if (dt == 0.0) return v;
  auto it = cache_.find(dt);
  if (it == cache_.end()) {
    Mat e = (L_->generator * dt).exp();
    it = cache_.emplace(dt, std::move(e)).first;
  }
  return it->second * v;
}

namespace {

std::vector<Cx> propagate_and_trace(const Liouvillian& L, const Mat& observable, CVec seed,
                                    const std::vector<double>& tau_grid) {
  for (size_t k = 1; k < tau_grid.size(); ++k)
    if (tau_grid[k] < tau_grid[k - 1])
      throw std::invalid_argument("tau grid must be monotone non-decreasing");
  if (!tau_grid.empty() && tau_grid.front() < 0.0)
    throw std::invalid_argument("tau grid must be non-negative");

  Propagator prop(L);
  std::vector<Cx> out;
  out.reserve(tau_grid.size());
  double t = 0.0;
  CVec v = std::move(seed);
  const int d = L.dim;
  for (double tau : tau_grid) {
    v = prop.apply(v, tau - t);
    t = tau;
    Cx val = 0.0;
    // Tr[A unvec(v)] without materializing the product.
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) val += observable(j, i) * v(i + j * d);
    out.push_back(val);
  }
  return out;
}

} // namespace

std::vector<Cx> two_time_correlator(const Liouvillian& L, const DensityOperator& rho_ss,
                                    const Mat& A, const Mat& B,
                                    const std::vector<double>& tau_grid) {
  return propagate_and_trace(L, A, ops::vec(Mat(B * rho_ss.matrix)), tau_grid);
}

std::vector<Cx> sandwich_correlator(const Liouvillian& L, const DensityOperator& rho_ss,
                                    const Mat& mid, const Mat& B,
                                    const std::vector<double>& tau_grid) {
  return propagate_and_trace(L, mid, ops::vec(Mat(B * rho_ss.matrix * B.adjoint())), tau_grid);
}

std::vector<Cx> two_time_correlator(const Liouvillian& L, const Mat& A, const Mat& B,
                                    const std::vector<double>& tau_grid) {
  return two_time_correlator(L, steady_state(L), A, B, tau_grid);
}

std::vector<Cx> sandwich_correlator(const Liouvillian& L, const Mat& mid, const Mat& B,
                                    const std::vector<double>& tau_grid) {
  return sandwich_correlator(L, steady_state(L), mid, B, tau_grid);
}

} // namespace qline
