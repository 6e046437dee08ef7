#pragma once

// Unit conventions used throughout the library:
//   energies are E/h in GHz, times in microseconds, rates in 1/us.
// Angular factors are applied only at the point a formula needs them.

#include <numbers>

namespace tqd::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double planck = 6.62607015e-34;             // J s
inline constexpr double boltzmann = 1.380649e-23;            // J / K
inline constexpr double elementary_charge = 1.602176634e-19;  // C

// Ordinary frequency in GHz to angular frequency in rad/us.
constexpr double angular_per_us(double f_ghz) { return two_pi * f_ghz * 1.0e3; }

// A rate expressed in GHz (1/ns) converted to 1/us.
constexpr double per_us(double rate_ghz) { return rate_ghz * 1.0e3; }

// Photon energy h*f in micro-electronvolts for f in GHz.
constexpr double photon_energy_ueV(double f_ghz) {
  return planck * f_ghz * 1.0e9 / elementary_charge * 1.0e6;
}

// h*f / (k_B * T) for f in GHz and T in kelvin.
constexpr double thermal_ratio(double f_ghz, double temperature_k) {
  return planck * f_ghz * 1.0e9 / (boltzmann * temperature_k);
}

}  // namespace tqd::units
