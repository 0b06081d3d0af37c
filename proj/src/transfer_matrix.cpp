#include "bandgap/transfer_matrix.hpp"

#include <cmath>
#include <functional>

namespace bandgap {

namespace {

void check_finite(const OperatingPoint& point) {
  if (!std::isfinite(point.vacuum_wavelength_nm) || !std::isfinite(point.angle_rad)) {
    throw ValidationError("operating point: wavelength and angle must be finite");
  }
  validate(point);
}

Matrix2 layer_matrix(Complex n, double thickness_nm, double k0, double beta, Polarization pol) {
  const Complex q = longitudinal_factor(n, beta);
  const Complex eta = tilted_admittance(n, q, pol);
  const Complex delta = k0 * q * thickness_nm;
  const Complex cs = std::cos(delta);
  const Complex sn = std::sin(delta);
  const Complex i(0.0, 1.0);
  return {cs, -i * sn / eta, -i * eta * sn, cs};
}

Matrix2 stack_matrix(const LayerStack& stack, double k0, double beta, Polarization pol,
                     double index_scale) {
  Matrix2 m;
  for (const auto& layer : stack.layers()) {
    m = m * layer_matrix(layer.refractive_index * index_scale, layer.thickness_nm, k0, beta, pol);
  }
  if (stack.air_gap_nm() > 0.0) {
    m = m * layer_matrix(stack.incident_medium(), stack.air_gap_nm(), k0, beta, pol);
  }
  return m;
}

struct Amplitudes {
  Complex t, r, eta_in, eta_out;
};

Amplitudes solve(const LayerStack& stack, double omega, double angle_rad, Polarization pol,
                 double index_scale) {
  const double k0 = omega / kSpeedOfLight;
  const double beta = stack.incident_medium().real() * std::sin(angle_rad);
  const Complex n_in = stack.incident_medium();
  const Complex n_out = stack.exit_medium();
  const Complex eta_in = tilted_admittance(n_in, longitudinal_factor(n_in, beta), pol);
  const Complex eta_out = tilted_admittance(n_out, longitudinal_factor(n_out, beta), pol);

  const Matrix2 m = stack_matrix(stack, k0, beta, pol, index_scale);
  const Complex b = m.a + m.b * eta_out;
  const Complex c = m.c + m.d * eta_out;
  const Complex denom = eta_in * b + c;
  return {2.0 * eta_in / denom, (eta_in * b - c) / denom, eta_in, eta_out};
}

double transmittance_of(const Amplitudes& amp) {
  return std::norm(amp.t) * amp.eta_out.real() / amp.eta_in.real();
}

// Phase at x1 continued from (x0, t0, phase0). Intervals whose endpoint phases
// differ by pi/2 or more are bisected until continuous or narrower than min_step.
double continue_phase(const std::function<Complex(double)>& t_of, double x0, Complex t0,
                      double phase0, double x1, Complex t1, double min_step) {
  const double jump = std::arg(t1 / t0);
  if (std::abs(jump) < kPi / 2 || std::abs(x1 - x0) <= min_step) return phase0 + jump;
  const double xm = 0.5 * (x0 + x1);
  const Complex tm = t_of(xm);
  const double pm = continue_phase(t_of, x0, t0, phase0, xm, tm, min_step);
  return continue_phase(t_of, xm, tm, pm, x1, t1, min_step);
}

// Upper estimate of the propagation phase per unit omega: sum |q_j| d_j / c.
double phase_rate(const LayerStack& stack, double angle_rad) {
  const double beta = stack.incident_medium().real() * std::sin(angle_rad);
  double optical = std::abs(longitudinal_factor(stack.incident_medium(), beta)) * stack.air_gap_nm();
  for (const auto& layer : stack.layers()) {
    optical += std::abs(longitudinal_factor(layer.refractive_index, beta)) * layer.thickness_nm;
  }
  return optical / kSpeedOfLight;
}

// Continues the phase over [x0, x1] in `pieces` uniform sub-intervals, each
// refined by bisection.
double continue_over(const std::function<Complex(double)>& t_of, double x0, Complex t0, double phase0,
                     double x1, Complex t1, int pieces, double min_step) {
  double x_prev = x0;
  Complex t_prev = t0;
  double phase = phase0;
  for (int s = 1; s <= pieces; ++s) {
    const double x = s == pieces ? x1 : x0 + (x1 - x0) * s / pieces;
    const Complex t = s == pieces ? t1 : t_of(x);
    phase = continue_phase(t_of, x_prev, t_prev, phase, x, t, min_step);
    x_prev = x;
    t_prev = t;
  }
  return phase;
}

int pieces_for(double phase_estimate) {
  return 1 + static_cast<int>(std::ceil(std::abs(phase_estimate) / (kPi / 8)));
}

}  // namespace

Complex longitudinal_factor(Complex n, double beta) {
  Complex q = std::sqrt(n * n - beta * beta);
  if (q.imag() < 0.0 || (q.imag() == 0.0 && q.real() < 0.0)) q = -q;
  return q;
}

Complex tilted_admittance(Complex n, Complex q, Polarization pol) {
  return pol == Polarization::S ? q : n * n / q;
}

Matrix2 characteristic_matrix(const LayerStack& stack, const OperatingPoint& point,
                              double index_scale) {
  check_finite(point);
  const double beta = stack.incident_medium().real() * std::sin(point.angle_rad);
  return stack_matrix(stack, point.free_space_k(), beta, point.polarization, index_scale);
}

Complex transmission_at(const LayerStack& stack, double omega, double angle_rad, Polarization pol,
                        double index_scale) {
  return solve(stack, omega, angle_rad, pol, index_scale).t;
}

std::array<Complex, 2> transmission_reflection(const LayerStack& stack, const OperatingPoint& point,
                                               double index_scale) {
  check_finite(point);
  const auto amp = solve(stack, point.omega(), point.angle_rad, point.polarization, index_scale);
  return {amp.t, amp.r};
}

double transmittance(const LayerStack& stack, const OperatingPoint& point) {
  check_finite(point);
  return transmittance_of(solve(stack, point.omega(), point.angle_rad, point.polarization, 1.0));
}

ScatteringAmplitudes scattering(const LayerStack& stack, const OperatingPoint& point) {
  check_finite(point);
  const double omega = point.omega();
  const auto amp = solve(stack, omega, point.angle_rad, point.polarization, 1.0);

  ScatteringAmplitudes out;
  out.t = amp.t;
  out.r = amp.r;
  out.reflectance = std::norm(amp.r);
  out.transmittance = transmittance_of(amp);

  // Continue arg(t) in frequency at fixed angle, starting near omega = 0.
  const auto t_of = [&](double w) {
    return transmission_at(stack, w, point.angle_rad, point.polarization);
  };
  const double w_start = omega * 1e-9;
  const Complex t_start = t_of(w_start);
  const double phase = continue_over(t_of, w_start, t_start, std::arg(t_start), omega, amp.t,
                                     3 + pieces_for(phase_rate(stack, point.angle_rad) * omega),
                                     omega * 1e-12);
  out.phi_t = phase;
  return out;
}

std::vector<SpectrumSample> transmission_spectrum(const LayerStack& stack,
                                                  std::span<const double> wavelengths_nm,
                                                  double angle_rad, Polarization pol) {
  if (wavelengths_nm.empty()) throw ValidationError("wavelengths: list must not be empty");
  for (std::size_t i = 0; i < wavelengths_nm.size(); ++i) {
    const double wl = wavelengths_nm[i];
    if (!std::isfinite(wl) || wl <= 0.0) throw ValidationError("wavelengths: all values must be > 0");
    if (i > 0 && wl < wavelengths_nm[i - 1]) throw ValidationError("wavelengths: must be sorted ascending");
  }

  const auto t_of = [&](double wl) {
    return transmission_at(stack, angular_frequency(wl), angle_rad, pol);
  };

  std::vector<SpectrumSample> out;
  out.reserve(wavelengths_nm.size());
  const auto first = scattering(stack, {wavelengths_nm[0], angle_rad, pol});
  out.push_back({wavelengths_nm[0], first.transmittance, first.reflectance, first.phi_t});

  const double rate = phase_rate(stack, angle_rad);
  Complex t_prev = first.t;
  for (std::size_t i = 1; i < wavelengths_nm.size(); ++i) {
    const auto amp = solve(stack, angular_frequency(wavelengths_nm[i]), angle_rad, pol, 1.0);
    const double omega_gap =
        angular_frequency(wavelengths_nm[i - 1]) - angular_frequency(wavelengths_nm[i]);
    const double phase = continue_over(t_of, wavelengths_nm[i - 1], t_prev, out.back().phi_t,
                                       wavelengths_nm[i], amp.t, pieces_for(rate * omega_gap), 1e-6);
    out.push_back({wavelengths_nm[i], transmittance_of(amp), std::norm(amp.r), phase});
    t_prev = amp.t;
  }
  return out;
}

BlochResult bloch_analysis(const LayerStack& unit_cell, const OperatingPoint& point) {
  if (unit_cell.empty() && unit_cell.air_gap_nm() == 0.0) {
    throw ValidationError("unit_cell: must contain at least one layer");
  }
  const double period = unit_cell.physical_length();
  if (!(period > 0.0)) throw ValidationError("unit_cell: zero-thickness cell");

  const Matrix2 m = characteristic_matrix(unit_cell, point);
  BlochResult out;
  out.period_nm = period;
  out.half_trace = 0.5 * m.trace();
  const Complex phase = std::acos(out.half_trace);
  out.quasimomentum = phase / period;
  out.kappa = std::abs(out.quasimomentum.imag());
  out.in_gap = std::abs(phase.imag()) > 1e-9;
  return out;
}

}  // namespace bandgap
