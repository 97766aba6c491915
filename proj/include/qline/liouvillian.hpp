#ifndef QLINE_LIOUVILLIAN_HPP
#define QLINE_LIOUVILLIAN_HPP

#include <vector>

#include "qline/operators.hpp"
#include "qline/types.hpp"

namespace qline {

// Lindblad generator in vectorized (column-major) form, expressed in the
// frame rotating at frame_freq.
struct Liouvillian {
  int dim;
  Mat generator; // dim^2 x dim^2
  double frame_freq;

  // Residual of the trace-preservation condition: the vectorized identity
  // must be a left null vector of the generator.
  double trace_preservation_defect() const;
};

// L(rho) = -i[H, rho] + sum_j D[J_j] rho. Jump operators may contain
// c-number offsets (identity components); the dissipator formula absorbs
// them into an effective Hamiltonian automatically.
Liouvillian make_liouvillian(const Mat& hamiltonian, const std::vector<Mat>& jumps,
                             double frame_freq = 0.0);

struct AtomBathOptions {
  double thermal_occupation = 0.0; // n_bar of the line at the atom frequency
  bool allow_beyond_rwa = false;   // escape hatch for far-detuned sweeps
};

// Driven two-level atom in the frame rotating at the drive:
//   H = -delta sigma+ sigma- + (Omega/2)(sigma+ + sigma-)
// with collapse operators sqrt(Gamma10) sigma- and sqrt(Gamma_phi/2) sigma_z.
Liouvillian build_atom_liouvillian(const AtomParams& atom, const DriveSpec& drive,
                                   const AtomBathOptions& opts = {});

// Atom cascaded into the single-mode filter resonator. The selected output
// port drives the filter unidirectionally; the transmission port carries the
// coherent carrier on top of the atomic emission. Internally the filter is
// displaced by the classical steady amplitude so that the Fock truncation
// only has to hold the fluctuations; detected_field is the physical
// (displaced-back) filter operator a + beta.
struct CascadedSystem {
  Liouvillian liouvillian;
  Mat detected_field;  // a + beta, on the joint space
  Mat top_fock_proj;   // projector onto the highest retained Fock level
  Cx displacement;
  int n_max;
};

CascadedSystem build_cascaded_liouvillian(const AtomParams& atom, const DriveSpec& drive,
                                          const FilterMode& filter, Port port,
                                          const AtomBathOptions& opts = {});

// Filter mode alone, coupled to a thermal bath: test surrogate for a
// thermal input of mean occupation n_bar.
CascadedSystem build_thermal_filter(const FilterMode& filter, double n_bar);

} // namespace qline

#endif
