#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace bandgap {

// Lengths are in nanometers, times in femtoseconds, angular frequencies in rad/fs.
inline constexpr double kSpeedOfLight = 299.792458;  // nm/fs
inline constexpr double kPi = std::numbers::pi;

inline double angular_frequency(double vacuum_wavelength_nm) {
  return 2.0 * kPi * kSpeedOfLight / vacuum_wavelength_nm;
}

inline double vacuum_wavelength(double omega) {
  return 2.0 * kPi * kSpeedOfLight / omega;
}

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Raised when an input violates an operation's precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a quantity is mathematically undefined at the requested point
/// (opaque barrier, pass-band semiclassical time, unbracketed dip, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bandgap
