#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "bandgap/stack.hpp"

namespace bandgap {

// Characteristic-matrix (thin-film) formulation with e^{-i omega t} time
// dependence. A layer maps the tangential (E, H) fields at its exit face back
// to its entrance face:
//
//   M_j = [ cos d_j          -i sin d_j / eta_j ]
//         [ -i eta_j sin d_j  cos d_j           ],   d_j = (omega/c) q_j thickness_j
//
// with q_j = sqrt(n_j^2 - (n_inc sin theta)^2), Im q_j >= 0, and tilted
// admittances eta_S = q, eta_P = n^2 / q. For P polarization t and r are
// ratios of tangential E fields.

/// 2x2 complex matrix, row-major.
struct Matrix2 {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  Matrix2 operator*(const Matrix2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Complex trace() const { return a + d; }
  Complex det() const { return a * d - b * c; }
};

struct ScatteringAmplitudes {
  Complex t;
  Complex r;
  double phi_t = 0.0;  // unwrapped transmission phase, radians
  double transmittance = 0.0;
  double reflectance = 0.0;
};

struct BlochResult {
  Complex quasimomentum;  // rad/nm, Re(K * period) in [0, pi]
  double kappa = 0.0;     // |Im K|, 1/nm
  Complex half_trace;
  double period_nm = 0.0;
  bool in_gap = false;
};

struct SpectrumSample {
  double wavelength_nm = 0.0;
  double transmittance = 0.0;
  double reflectance = 0.0;
  double phi_t = 0.0;
};

/// Longitudinal wavenumber factor q = sqrt(n^2 - beta^2) on the decaying branch.
Complex longitudinal_factor(Complex n, double beta);

/// Tilted admittance of a medium for the given polarization.
Complex tilted_admittance(Complex n, Complex q, Polarization pol);

/// Product of the layer characteristic matrices (including any air gap).
/// `index_scale` multiplies the index of every barrier layer but not the ambient media.
Matrix2 characteristic_matrix(const LayerStack& stack, const OperatingPoint& point,
                              double index_scale = 1.0);

/// t and r only, no phase unwrapping. Cheap enough for derivative stencils.
std::array<Complex, 2> transmission_reflection(const LayerStack& stack, const OperatingPoint& point,
                                               double index_scale = 1.0);
Complex transmission_at(const LayerStack& stack, double omega, double angle_rad, Polarization pol,
                        double index_scale = 1.0);

/// |t|^2 Re(eta_out) / Re(eta_in) without the phase continuation.
double transmittance(const LayerStack& stack, const OperatingPoint& point);

/// Full amplitudes with phi_t continued from the long-wavelength limit, where
/// t is real and phi_t = 0, up to the requested frequency.
ScatteringAmplitudes scattering(const LayerStack& stack, const OperatingPoint& point);

/// Sweep over ascending wavelengths; phi_t is continuous along the sweep.
std::vector<SpectrumSample> transmission_spectrum(const LayerStack& stack,
                                                  std::span<const double> wavelengths_nm,
                                                  double angle_rad, Polarization pol);

/// Bloch analysis of a periodic cell: cos(K * period) = trace(M_cell) / 2.
BlochResult bloch_analysis(const LayerStack& unit_cell, const OperatingPoint& point);

}  // namespace bandgap
