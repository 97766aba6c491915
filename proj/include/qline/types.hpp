#ifndef QLINE_TYPES_HPP
#define QLINE_TYPES_HPP

#include <stdexcept>
#include <string>

#include "qline/units.hpp"

namespace qline {

// Two-level scatterer embedded in the 1D line.
//   omega01   transition frequency (rad/s)
//   gamma10   energy relaxation rate Gamma_10 (rad/s), dominated by the line
//   gamma_phi pure dephasing rate (rad/s)
// Total coherence decay gamma10/2 + gamma_phi must stay positive.
struct AtomParams {
  double omega01;
  double gamma10;
  double gamma_phi;

  AtomParams(double omega01_, double gamma10_, double gamma_phi_)
      : omega01(omega01_), gamma10(gamma10_), gamma_phi(gamma_phi_) {
    if (omega01 <= 0.0) throw std::invalid_argument("AtomParams: omega01 must be > 0");
    if (gamma10 < 0.0 || gamma_phi < 0.0)
      throw std::invalid_argument("AtomParams: rates must be >= 0");
    if (coherence_decay() <= 0.0)
      throw std::invalid_argument("AtomParams: gamma10/2 + gamma_phi must be > 0");
  }

  // gamma_10 = Gamma_10/2 + Gamma_phi, the off-diagonal decay rate.
  double coherence_decay() const { return 0.5 * gamma10 + gamma_phi; }

  static AtomParams from_ghz_mhz(double omega01_ghz, double gamma10_mhz, double gamma_phi_mhz) {
    return AtomParams(units::ghz_to_rad(omega01_ghz), units::mhz_to_rad(gamma10_mhz),
                      units::mhz_to_rad(gamma_phi_mhz));
  }

  // Device extracted from the transmission fits.
  static AtomParams device_default() { return from_ghz_mhz(5.12, 41.0, 1.0); }
};

// Incident coherent tone at the atom plane.
//   omega_p     carrier (rad/s)
//   power_watts incident power at the atom
//   photon_flux P/(hbar omega_p), photons per second
//   n_photons   mean photons per interaction time 2pi/Gamma_10
//   omega_rabi  drive Rabi frequency (rad/s)
//
// Calibration: Omega_p = sqrt(2 Gamma_10 Phi) with Phi the incident photon
// flux, the standard input-output relation for symmetric coupling to the
// line. Together with N = 2 pi Phi / Gamma_10 this gives
// Omega_p = Gamma_10 sqrt(N / pi).
struct DriveSpec {
  double omega_p;
  double power_dbm;
  double power_watts;
  double photon_flux;
  double n_photons;
  double omega_rabi;

  static DriveSpec make(const AtomParams& atom, double omega_p, double power_dbm) {
    DriveSpec d;
    d.omega_p = omega_p;
    d.power_dbm = power_dbm;
    d.power_watts = units::dbm_to_watts(power_dbm);
    d.photon_flux = d.power_watts / (units::hbar * omega_p);
    d.n_photons = units::two_pi * d.photon_flux / atom.gamma10;
    d.omega_rabi = std::sqrt(2.0 * atom.gamma10 * d.photon_flux);
    return d;
  }

  static DriveSpec resonant(const AtomParams& atom, double power_dbm) {
    return make(atom, atom.omega01, power_dbm);
  }

  static DriveSpec from_photon_number(const AtomParams& atom, double n, double detuning = 0.0) {
    double omega_p = atom.omega01 + detuning;
    double watts = n * units::hbar * omega_p * atom.gamma10 / units::two_pi;
    return make(atom, omega_p, units::watts_to_dbm(watts));
  }

  static DriveSpec from_rabi(const AtomParams& atom, double omega_rabi, double detuning = 0.0) {
    double omega_p = atom.omega01 + detuning;
    double flux = omega_rabi * omega_rabi / (2.0 * atom.gamma10);
    return make(atom, omega_p, units::watts_to_dbm(flux * units::hbar * omega_p));
  }

  double detuning(const AtomParams& atom) const { return omega_p - atom.omega01; }
};

// Single-mode resonator standing in for the digital detection filter.
// kappa = 2 pi BW so that a thermal input reproduces
// g2(tau) = 1 + exp(-2 pi BW |tau|).
struct FilterMode {
  double kappa;
  int n_max;

  FilterMode(double kappa_, int n_max_ = 10) : kappa(kappa_), n_max(n_max_) {
    if (kappa <= 0.0) throw std::invalid_argument("FilterMode: kappa must be > 0");
    if (n_max < 4) throw std::invalid_argument("FilterMode: n_max must be >= 4");
  }

  static FilterMode from_bandwidth_mhz(double bw_mhz, int n_max = 10) {
    return FilterMode(units::mhz_to_rad(bw_mhz), n_max);
  }

  double bandwidth_mhz() const { return units::rad_to_mhz(kappa); }
};

enum class Port { reflection, transmission };

inline std::string to_string(Port p) {
  return p == Port::reflection ? "reflected" : "transmitted";
}

} // namespace qline

#endif
