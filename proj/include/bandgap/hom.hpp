#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "bandgap/stack.hpp"

namespace bandgap {

// Two-photon coincidence model. A degenerate pair from a monochromatic pump
// has joint amplitude f(Omega) at frequencies (omega0 + Omega, omega0 - Omega).
// The photon in the barrier arm is filtered by t(omega); the other arm is
// delayed by tau relative to it. After the 50/50 beamsplitter
//
//   R(tau) = 1 - Re int |f|^2 t(omega0 + Omega) t*(omega0 - Omega) e^{-2i Omega tau} dOmega / A
//   A      = int |f|^2 (|t(omega0 + Omega)|^2 + |t(omega0 - Omega)|^2) / 2 dOmega
//
// normalized so that R -> 1 for distinguishable (well separated) photons.
// See docs/hom_model.md for the derivation.

enum class SpectrumShape { Gaussian, Sinc2 };

class PhotonPairSpectrum {
 public:
  /// `correlation_time_fs` is the RMS width of the unit-transmission dip.
  explicit PhotonPairSpectrum(double pump_wavelength_nm = 351.0, double correlation_time_fs = 15.0,
                              SpectrumShape shape = SpectrumShape::Gaussian);

  static PhotonPairSpectrum degenerate_at(double center_wavelength_nm, double correlation_time_fs,
                                          SpectrumShape shape = SpectrumShape::Gaussian);

  double pump_wavelength_nm() const { return pump_wavelength_nm_; }
  double center_wavelength_nm() const { return 2.0 * pump_wavelength_nm_; }
  double center_omega() const { return 0.5 * angular_frequency(pump_wavelength_nm_); }
  double correlation_time_fs() const { return correlation_time_fs_; }
  SpectrumShape shape() const { return shape_; }

  /// |f(Omega)|^2, even in Omega, unit integral over [-support, support].
  double density(double detuning) const;

  /// Half-width of the detuning interval the model integrates over (rad/fs).
  double support_half_width() const;

  /// RMS detuning of the Gaussian shape; sinc^2 returns its width parameter.
  double width_parameter() const;

 private:
  double pump_wavelength_nm_;
  double correlation_time_fs_;
  SpectrumShape shape_;
  double norm_ = 1.0;
  int sinc_lobes_ = 0;
};

/// Complex amplitude filter applied to the barrier arm, valid on
/// [omega_min, omega_max].
struct BarrierResponse {
  std::function<Complex(double omega)> t;
  double omega_min = 0.0;
  double omega_max = std::numeric_limits<double>::infinity();

  static BarrierResponse constant(Complex value);

  /// t_stack(omega) / t_air(omega) at fixed angle: the mirror-in versus
  /// mirror-out comparison, so the dip sits at the relative delay.
  static BarrierResponse relative_to_air(const LayerStack& stack, double angle_rad, Polarization pol);

  /// Linear interpolation of sampled values (ascending omegas).
  static BarrierResponse tabulated(std::vector<double> omegas, std::vector<Complex> values);
};

/// Tabulates the integrand at Gauss-Legendre nodes once, refining panels
/// until the rate is stable for delays up to `max_abs_delay_fs`.
class CoincidenceModel {
 public:
  CoincidenceModel(const PhotonPairSpectrum& spectrum, const BarrierResponse& barrier,
                   double max_abs_delay_fs);

  double rate(double delay_fs) const;
  std::size_t node_count() const { return detuning_.size(); }
  double plateau() const { return plateau_; }

 private:
  void tabulate(const PhotonPairSpectrum& spectrum, const BarrierResponse& barrier, int panels);

  std::vector<double> detuning_;
  std::vector<double> weight_;   // quadrature weight times |f|^2
  std::vector<Complex> cross_;   // t(omega0 + Omega) t*(omega0 - Omega)
  double plateau_ = 1.0;
};

double coincidence_rate(const PhotonPairSpectrum& spectrum, const BarrierResponse& barrier,
                        double relative_delay_fs);

struct DipTrace {
  std::vector<double> delays_fs;
  std::vector<double> rates;
  double dip_center_fs = 0.0;
  double visibility = 0.0;

  /// Trombone positions for a double-pass prism: x = c tau / 2.
  std::vector<double> prism_positions_um() const;
};

double prism_position_um(double delay_fs);
double delay_from_prism_um(double position_um);

/// Rates at each delay plus the dip center from a 5-point least-squares
/// parabola around the discrete minimum.
DipTrace trace_dip(const PhotonPairSpectrum& spectrum, const BarrierResponse& barrier,
                   std::span<const double> delays_fs, unsigned threads = 1);

/// Minimum of a 5-point least-squares parabola centred on the discrete minimum.
double parabolic_dip_center(std::span<const double> x, std::span<const double> y);

/// Evenly spaced delays from `from` to `to` inclusive.
std::vector<double> delay_grid(double from_fs, double to_fs, double step_fs);

struct NarrowbandCheck {
  double dip_shift_fs = 0.0;
  double group_delay_fs = 0.0;  // relative to air
  double difference_fs = 0.0;
};

/// Dip center versus stationary-phase relative group delay. Requires a
/// correlation time of at least 100 fs.
NarrowbandCheck narrowband_check(const PhotonPairSpectrum& spectrum, const LayerStack& stack,
                                 double angle_rad, Polarization pol);

/// Same comparison without the narrowband precondition; the dip is sampled
/// at correlation_time/100 over +-5 correlation times.
NarrowbandCheck dip_versus_group_delay(const PhotonPairSpectrum& spectrum, const LayerStack& stack,
                                       double angle_rad, Polarization pol, unsigned threads = 1);

}  // namespace bandgap
