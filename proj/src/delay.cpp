#include "bandgap/delay.hpp"

#include <cmath>
#include <limits>

#include "bandgap/parallel.hpp"
#include "bandgap/transfer_matrix.hpp"

namespace bandgap {

namespace {

void require_transmitting(const LayerStack& stack, const OperatingPoint& point) {
  if (!(transmittance(stack, point) > kOpaqueThreshold)) {
    throw NumericalError("opaque point: phase derivative undefined");
  }
}

RichardsonOptions frequency_steps(double omega) {
  return {1e-4 * omega, 1e-8 * omega, 1e-6, 1e-12};
}

RichardsonOptions angle_steps() { return {1e-4, 1e-8, 1e-6, 1e-12}; }

RichardsonOptions larmor_steps(double omega) {
  return {1e-5 * omega, 1e-9 * omega, 1e-6, 1e-12};
}

}  // namespace

std::string describe_flags(unsigned flags) {
  std::string out;
  auto add = [&](const char* token) {
    if (!out.empty()) out += ';';
    out += token;
  };
  if (flags & delay_flags::kOpaque) add("opaque");
  if (flags & delay_flags::kUnconverged) add("derivative-unconverged");
  if (flags & delay_flags::kOutsideGap) add("outside-gap");
  return out;
}

DerivativeEstimate<double> phase_frequency_derivative(const LayerStack& stack,
                                                      const OperatingPoint& point) {
  validate(point);
  const double omega = point.omega();
  const auto t_at = [&](double w) {
    return transmission_at(stack, w, point.angle_rad, point.polarization);
  };
  return richardson_derivative(
      [&](double h) { return std::arg(t_at(omega + h) / t_at(omega - h)) / (2.0 * h); },
      frequency_steps(omega));
}

DerivativeEstimate<double> phase_angle_derivative(const LayerStack& stack,
                                                  const OperatingPoint& point) {
  validate(point);
  const double omega = point.omega();
  const auto t_at = [&](double theta) {
    return transmission_at(stack, omega, theta, point.polarization);
  };
  const double theta = point.angle_rad;
  return richardson_derivative(
      [&](double h) { return std::arg(t_at(theta + h) / t_at(theta - h)) / (2.0 * h); },
      angle_steps());
}

namespace {

struct ShiftResult {
  double value;
  bool converged;
};

ShiftResult transverse_shift_impl(const LayerStack& stack, const OperatingPoint& point) {
  const auto dphi = phase_angle_derivative(stack, point);
  // k_y = k n_inc sin(theta), so d/dk_y = d/dtheta / (k n_inc cos(theta)).
  const double k_parallel_scale =
      point.free_space_k() * stack.incident_medium().real() * std::cos(point.angle_rad);
  return {-dphi.value / k_parallel_scale, dphi.converged};
}

struct GroupDelayResult {
  double group_delay;
  double phase_derivative;
  double shift;
  bool converged;
};

GroupDelayResult group_delay_impl(const LayerStack& stack, const OperatingPoint& point) {
  const auto dphi = phase_frequency_derivative(stack, point);
  const auto shift = transverse_shift_impl(stack, point);
  const double sin_theta = stack.incident_medium().real() * std::sin(point.angle_rad);
  return {dphi.value + shift.value / kSpeedOfLight * sin_theta, dphi.value, shift.value,
          dphi.converged && shift.converged};
}

LarmorTimes larmor_from(const LayerStack& stack, const OperatingPoint& point, double group_delay_fs) {
  const double omega = point.omega();
  const auto t_scaled = [&](double larmor_freq) {
    return transmission_at(stack, omega, point.angle_rad, point.polarization, 1.0 + larmor_freq / omega);
  };
  const auto dlnt = richardson_derivative(
      [&](double h) { return std::log(t_scaled(h) / t_scaled(-h)) / (2.0 * h); }, larmor_steps(omega));

  // Complex time with its real part oriented along +dphi/dOmega_L, the
  // branch on which it tracks the group delay. Its imaginary part is then
  // -dln|t|/dOmega_L.
  LarmorTimes out;
  out.in_plane_raw_fs = dlnt.value.imag();
  out.out_of_plane_fs = -dlnt.value.real();
  out.magnitude_fs = std::sqrt(group_delay_fs * group_delay_fs + out.out_of_plane_fs * out.out_of_plane_fs);
  out.converged = dlnt.converged;
  return out;
}

}  // namespace

double transverse_shift(const LayerStack& stack, const OperatingPoint& point) {
  validate(point);
  require_transmitting(stack, point);
  return transverse_shift_impl(stack, point).value;
}

double group_delay(const LayerStack& stack, const OperatingPoint& point) {
  validate(point);
  require_transmitting(stack, point);
  return group_delay_impl(stack, point).group_delay;
}

LarmorTimes larmor_time(const LayerStack& stack, const OperatingPoint& point) {
  validate(point);
  require_transmitting(stack, point);
  const auto gd = group_delay_impl(stack, point);
  auto out = larmor_from(stack, point, gd.group_delay);
  out.converged = out.converged && gd.converged;
  return out;
}

LayerStack unit_cell_of(const LayerStack& stack) {
  if (stack.empty()) throw NumericalError("semiclassical time undefined outside gap");
  const auto& layers = stack.layers();
  const std::size_t cell = layers.size() >= 2 ? 2 : 1;
  return LayerStack({layers.begin(), layers.begin() + static_cast<std::ptrdiff_t>(cell)},
                    stack.incident_medium(), stack.exit_medium(), "unit cell");
}

double semiclassical_time(const LayerStack& stack, const OperatingPoint& point) {
  validate(point);
  const auto bloch = bloch_analysis(unit_cell_of(stack), point);
  if (!bloch.in_gap) throw NumericalError("semiclassical time undefined outside gap");
  const double omega = point.omega();
  return stack.total_thickness() * omega / (kSpeedOfLight * kSpeedOfLight * bloch.kappa);
}

double air_time(const LayerStack& stack, const OperatingPoint& point, double transverse_shift_nm) {
  const double theta = point.angle_rad;
  return (stack.physical_length() * std::cos(theta) + transverse_shift_nm * std::sin(theta)) /
         kSpeedOfLight;
}

DelayReport delay_report(const LayerStack& stack, const OperatingPoint& point) {
  validate(point);
  DelayReport report;
  report.angle_rad = point.angle_rad;
  report.transmittance = transmittance(stack, point);
  if (!(report.transmittance > kOpaqueThreshold)) {
    throw NumericalError("opaque point: phase derivative undefined");
  }

  const auto gd = group_delay_impl(stack, point);
  report.group_delay_fs = gd.group_delay;
  report.phase_derivative_fs = gd.phase_derivative;
  report.transverse_shift_nm = gd.shift;

  const auto larmor = larmor_from(stack, point, gd.group_delay);
  report.larmor_out_of_plane_fs = larmor.out_of_plane_fs;
  report.larmor_time_fs = larmor.magnitude_fs;
  report.larmor_in_plane_raw_fs = larmor.in_plane_raw_fs;
  if (!gd.converged || !larmor.converged) report.flags |= delay_flags::kUnconverged;

  try {
    report.semiclassical_time_fs = semiclassical_time(stack, point);
  } catch (const NumericalError&) {
    report.flags |= delay_flags::kOutsideGap;
  }

  report.air_time_fs = air_time(stack, point, gd.shift);
  report.relative_group_delay_fs = report.group_delay_fs - report.air_time_fs;
  report.relative_larmor_time_fs = report.larmor_time_fs - report.air_time_fs;
  return report;
}

std::vector<DelayReport> angle_scan(const LayerStack& stack, double wavelength_nm, Polarization pol,
                                    std::span<const double> angles_rad, unsigned threads) {
  for (double a : angles_rad) {
    if (!std::isfinite(a) || a < 0.0 || a > deg_to_rad(85.0) + 1e-12) {
      throw ValidationError("angles: each angle must lie in [0, 85] degrees");
    }
  }
  validate(OperatingPoint{wavelength_nm, 0.0, pol});

  std::vector<DelayReport> rows(angles_rad.size());
  parallel_for(angles_rad.size(), threads, [&](std::size_t i) {
    const OperatingPoint point{wavelength_nm, angles_rad[i], pol};
    try {
      rows[i] = delay_report(stack, point);
    } catch (const NumericalError&) {
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      DelayReport row;
      row.angle_rad = angles_rad[i];
      row.transmittance = transmittance(stack, point);
      row.group_delay_fs = row.transverse_shift_nm = row.phase_derivative_fs = nan;
      row.larmor_out_of_plane_fs = row.larmor_time_fs = row.larmor_in_plane_raw_fs = nan;
      row.air_time_fs = row.relative_group_delay_fs = row.relative_larmor_time_fs = nan;
      row.flags = delay_flags::kOpaque;
      rows[i] = row;
    }
  });
  return rows;
}

}  // namespace bandgap
