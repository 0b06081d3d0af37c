#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandgap/numdiff.hpp"
#include "bandgap/stack.hpp"

namespace bandgap {

// Candidate tunneling times for a barrier at one operating point.
//
//   transverse shift  dy   = -dphi/dk_y        = -(1 / (k cos theta)) dphi/dtheta
//   group delay       tau_g = dphi/domega|_theta + (dy / c) sin theta
//   complex time      tau_c : index of every barrier layer scaled by (1 + Omega_L/omega)
//   Larmor time             = sqrt(tau_g^2 + Im(tau_c)^2)
//   semiclassical     tau_sc = d omega / (c^2 kappa)
//   air time                = (d cos theta + dy sin theta) / c
//
// All frequency/angle/Larmor derivatives are adaptive central differences
// cross-checked against (h, h/2) Richardson extrapolation.

namespace delay_flags {
inline constexpr unsigned kOpaque = 1u << 0;           // transmittance <= 1e-8
inline constexpr unsigned kUnconverged = 1u << 1;      // a derivative missed the cross-check
inline constexpr unsigned kOutsideGap = 1u << 2;       // semiclassical time undefined (informational)
inline constexpr unsigned kFailureMask = kOpaque | kUnconverged;
}  // namespace delay_flags

std::string describe_flags(unsigned flags);

inline constexpr double kOpaqueThreshold = 1e-8;

struct LarmorTimes {
  double out_of_plane_fs = 0.0;  // imaginary part of the complex time
  double magnitude_fs = 0.0;     // quadrature with the group delay
  double in_plane_raw_fs = 0.0;  // real part of the complex time, debug only
  bool converged = true;
};

struct DelayReport {
  double angle_rad = 0.0;
  double transmittance = 0.0;
  double group_delay_fs = 0.0;
  double transverse_shift_nm = 0.0;
  double phase_derivative_fs = 0.0;
  double larmor_out_of_plane_fs = 0.0;
  double larmor_time_fs = 0.0;
  double larmor_in_plane_raw_fs = 0.0;
  std::optional<double> semiclassical_time_fs;
  double air_time_fs = 0.0;
  double relative_group_delay_fs = 0.0;
  double relative_larmor_time_fs = 0.0;
  unsigned flags = 0;

  bool failed() const { return (flags & delay_flags::kFailureMask) != 0; }
};

/// dphi/domega at fixed incidence angle, fs.
DerivativeEstimate<double> phase_frequency_derivative(const LayerStack& stack, const OperatingPoint& point);

/// dphi/dtheta at fixed frequency, rad/rad.
DerivativeEstimate<double> phase_angle_derivative(const LayerStack& stack, const OperatingPoint& point);

/// Lateral walk-off of the transmitted beam, nm.
double transverse_shift(const LayerStack& stack, const OperatingPoint& point);

/// Stationary-phase delay, fs (absolute, not air-subtracted).
double group_delay(const LayerStack& stack, const OperatingPoint& point);

LarmorTimes larmor_time(const LayerStack& stack, const OperatingPoint& point);

/// Periodic cell used for the Bloch decay constant: the first two layers
/// (one layer for single-layer stacks).
LayerStack unit_cell_of(const LayerStack& stack);

/// Photonic transcription of m d / (hbar kappa), fs. Throws NumericalError
/// when the unit cell is not in a gap.
double semiclassical_time(const LayerStack& stack, const OperatingPoint& point);

/// Vacuum wavefront time from the entrance plane to the exit-plane point
/// displaced by `transverse_shift_nm`.
double air_time(const LayerStack& stack, const OperatingPoint& point, double transverse_shift_nm);

/// Every timescale at one point. Opaque points throw NumericalError.
DelayReport delay_report(const LayerStack& stack, const OperatingPoint& point);

/// One report per angle, in input order. Per-point failures are returned as
/// flagged rows with NaN timescales rather than aborting the scan.
std::vector<DelayReport> angle_scan(const LayerStack& stack, double wavelength_nm, Polarization pol,
                                    std::span<const double> angles_rad, unsigned threads = 1);

}  // namespace bandgap
