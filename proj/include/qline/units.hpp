#ifndef QLINE_UNITS_HPP
#define QLINE_UNITS_HPP

#include <cmath>

// Internal convention: angular frequencies and rates in rad/s, powers in
// watts, times in seconds. User-facing I/O uses GHz/MHz/dBm/ns and is
// converted at the boundary.
namespace qline::units {

inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double k_boltzmann = 1.380649e-23; // J/K
inline constexpr double two_pi = 6.283185307179586;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

inline double ghz_to_rad(double ghz) { return two_pi * ghz * 1e9; }
inline double mhz_to_rad(double mhz) { return two_pi * mhz * 1e6; }
inline double rad_to_ghz(double w) { return w / (two_pi * 1e9); }
inline double rad_to_mhz(double w) { return w / (two_pi * 1e6); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Bose occupation of a mode at angular frequency w for temperature T (K).
inline double thermal_occupation(double omega, double temp_k) {
  if (temp_k <= 0.0) return 0.0;
  return 1.0 / std::expm1(hbar * omega / (k_boltzmann * temp_k));
}

} // namespace qline::units

#endif
