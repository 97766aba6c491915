#ifndef QLINE_DENSITY_HPP
#define QLINE_DENSITY_HPP

#include <iosfwd>

#include "qline/operators.hpp"

namespace qline {

// Density operator with its validity checks. The checks are opt-in
// (validate()) so that intermediate solver states can be cheap.
struct DensityOperator {
  int dim;
  Mat matrix;

  DensityOperator(int dim_, Mat m) : dim(dim_), matrix(std::move(m)) {}

  static DensityOperator ground(int dim) {
    Mat m = Mat::Zero(dim, dim);
    m(0, 0) = 1.0;
    return DensityOperator(dim, std::move(m));
  }

  double hermiticity_defect() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  }

  double trace_defect() const { return std::abs(matrix.trace() - Cx(1.0)); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (matrix + matrix.adjoint()));
    return es.eigenvalues().minCoeff();
  }

  bool valid(double herm_tol = 1e-10, double trace_tol = 1e-10, double pos_tol = 1e-9) const {
    return hermiticity_defect() < herm_tol && trace_defect() < trace_tol &&
           min_eigenvalue() > -pos_tol;
  }

  Cx expect(const Mat& op) const { return (op * matrix).trace(); }
};

// Plain-text debug dump: header line with dim and rotating-frame frequency,
// then column-major (re, im) pairs, one per line.
void dump_state(std::ostream& os, const DensityOperator& rho, double frame_freq);
DensityOperator load_state(std::istream& is, double* frame_freq = nullptr);

} // namespace qline

#endif
