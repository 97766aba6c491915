#ifndef QLINE_OPERATORS_HPP
#define QLINE_OPERATORS_HPP

#include <complex>

#include <Eigen/Dense>

namespace qline {

using Cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr Cx iu{0.0, 1.0};

namespace ops {

inline Mat sigma_minus() {
  Mat s = Mat::Zero(2, 2);
  s(0, 1) = 1.0; // |0><1|
  return s;
}

inline Mat sigma_plus() { return sigma_minus().adjoint(); }

inline Mat sigma_z() {
  Mat s = Mat::Zero(2, 2);
  s(0, 0) = -1.0;
  s(1, 1) = 1.0; // excited state = index 1
  return s;
}

inline Mat number_tls() {
  Mat s = Mat::Zero(2, 2);
  s(1, 1) = 1.0;
  return s;
}

inline Mat destroy(int n) {
  Mat a = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Column-major vectorization; vec(A X B) = (B^T (x) A) vec(X).
inline CVec vec(const Mat& m) { return Eigen::Map<const CVec>(m.data(), m.size()); }

inline Mat unvec(const CVec& v, int dim) {
  return Eigen::Map<const Mat>(v.data(), dim, dim);
}

} // namespace ops
} // namespace qline

#endif
