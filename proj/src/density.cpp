#include "qline/density.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "qline/errors.hpp"

namespace qline {

void dump_state(std::ostream& os, const DensityOperator& rho, double frame_freq) {
  os << "# qline density dump\n";
  os << "dim " << rho.dim << "\n";
  os << std::setprecision(17) << "frame_freq_rad_s " << frame_freq << "\n";
  const auto& m = rho.matrix;
  for (int j = 0; j < rho.dim; ++j)
    for (int i = 0; i < rho.dim; ++i)
      os << m(i, j).real() << " " << m(i, j).imag() << "\n";
}

DensityOperator load_state(std::istream& is, double* frame_freq) {
  std::string line, key;
  if (!std::getline(is, line) || line.rfind("# qline density dump", 0) != 0)
    throw ConfigError("load_state: missing dump header");
  int dim = 0;
  double freq = 0.0;
  is >> key >> dim;
  if (key != "dim" || dim <= 0) throw ConfigError("load_state: bad dim line");
  is >> key >> freq;
  if (key != "frame_freq_rad_s") throw ConfigError("load_state: bad frame line");
  Mat m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) {
      double re, im;
      if (!(is >> re >> im)) throw ConfigError("load_state: truncated matrix data");
      m(i, j) = Cx(re, im);
    }
  if (frame_freq) *frame_freq = freq;
  return DensityOperator(dim, std::move(m));
}

} // namespace qline
