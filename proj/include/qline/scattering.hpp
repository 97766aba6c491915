#ifndef QLINE_SCATTERING_HPP
#define QLINE_SCATTERING_HPP

#include <array>
#include <limits>
#include <vector>

#include "qline/operators.hpp"
#include "qline/types.hpp"

namespace qline {

// Inelastic (fluctuation) emission spectrum of the atom, resolved into the
// eigenmodes of the Liouvillian. Frequencies are offsets from the drive,
// rad/s. Evaluation and band integrals are closed-form per mode, so the
// full-line integral is exact.
class FluctuationSpectrum {
 public:
  FluctuationSpectrum(const AtomParams& atom, const DriveSpec& drive);

  // Spectral density (photon flux per rad/s, referenced to total emission
  // Gamma10) at offset delta from the drive.
  double value(double delta) const;

  // Integral over [lo, hi] (rad/s offsets), closed form.
  double band_integral(double lo, double hi) const;

  // Integral over the whole line; equals Gamma10 (<n> - |<sigma->|^2).
  double full_integral() const;

  double incoherent_flux() const { return incoherent_flux_; } // Gamma10 (<n>-|s|^2)
  double coherent_flux() const { return coherent_flux_; }     // Gamma10 |s|^2
  double excited_population() const { return p_excited_; }
  Cx dipole() const { return dipole_; } // <sigma->_ss

  struct Mode {
    double gamma; // decay (positive)
    double nu;    // oscillation offset
    Cx coeff;     // Re part is the mode's integrated flux
  };
  const std::vector<Mode>& modes() const { return modes_; }

 private:
  std::vector<Mode> modes_;
  double coherent_flux_ = 0.0;
  double incoherent_flux_ = 0.0;
  double p_excited_ = 0.0;
  Cx dipole_ = 0.0;
};

// Steady-state input-output observables. T and R are coherent (phase
// sensitive) power ratios; the fractions are photon-flux fractions of the
// incident beam.
struct ScatterResult {
  double transmittance;
  double reflectance;
  double elastic_frac;              // T + R
  double inelastic_frac;            // both ports, full band
  double inelastic_in_band_frac;    // both ports, within the analysis band
  double bw_hz;                     // analysis bandwidth used (inf = full)
  Cx t_amplitude;
  Cx r_amplitude;
};

inline constexpr double full_band = std::numeric_limits<double>::infinity();

ScatterResult transmittance(const AtomParams& atom, const DriveSpec& drive,
                            double bw_hz = full_band);

struct CoherenceReport {
  double g1;              // elastic / total within the band
  double elastic_power_w; // reflected port, atom plane
  double total_power_w;
  double bw_hz;
};

enum class BandWindow { brickwall, lorentzian };

CoherenceReport elastic_vs_total_power(const AtomParams& atom, const DriveSpec& drive,
                                       double bw_hz,
                                       BandWindow window = BandWindow::brickwall);

struct Lorentzian {
  double center; // rad/s, absolute frequency
  double hwhm;   // rad/s
  double weight; // integrated photon flux
};

struct MollowSpectrum {
  double elastic_weight; // delta-component flux, Gamma10 |<sigma->|^2
  std::array<Lorentzian, 3> peaks;
  bool fit_ok;
  double total_inelastic;   // Gamma10 (<n> - |<sigma->|^2)
  double spectral_integral; // elastic + inelastic over the grid span + tails
  std::vector<double> omega_grid; // absolute rad/s
  std::vector<double> values;
};

MollowSpectrum mollow_spectrum(const AtomParams& atom, const DriveSpec& drive,
                               const std::vector<double>& omega_grid);

} // namespace qline

#endif
