#include "bandgap/hom.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "bandgap/delay.hpp"
#include "bandgap/parallel.hpp"
#include "bandgap/transfer_matrix.hpp"

namespace bandgap {

namespace {

constexpr int kGaussOrder = 16;
constexpr double kGaussianSupportSigmas = 6.0;
constexpr int kMaxSincLobes = 64;
constexpr int kMinSincLobes = 4;
// Sinc^2 tails are cut where they would pass half the carrier frequency.
constexpr double kMaxSupportFraction = 0.5;

// Composite Gauss-Legendre nodes and weights on [-half_width, half_width].
void composite_gauss(double half_width, int panels, std::vector<double>& nodes,
                     std::vector<double>& weights) {
  using Rule = boost::math::quadrature::gauss<double, kGaussOrder>;
  const auto& abscissa = Rule::abscissa();
  const auto& w = Rule::weights();
  nodes.clear();
  weights.clear();
  const double width = 2.0 * half_width / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = -half_width + (p + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t k = 0; k < abscissa.size(); ++k) {
      if (abscissa[k] == 0.0) {
        nodes.push_back(mid);
        weights.push_back(w[k] * half);
        continue;
      }
      nodes.push_back(mid - half * abscissa[k]);
      weights.push_back(w[k] * half);
      nodes.push_back(mid + half * abscissa[k]);
      weights.push_back(w[k] * half);
    }
  }
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace

PhotonPairSpectrum::PhotonPairSpectrum(double pump_wavelength_nm, double correlation_time_fs,
                                       SpectrumShape shape)
    : pump_wavelength_nm_(pump_wavelength_nm), correlation_time_fs_(correlation_time_fs), shape_(shape) {
  if (!std::isfinite(pump_wavelength_nm) || pump_wavelength_nm <= 0.0) {
    throw ValidationError("pump_wavelength: must be > 0");
  }
  if (!std::isfinite(correlation_time_fs) || correlation_time_fs <= 0.0) {
    throw ValidationError("correlation_time: must be > 0");
  }
  if (shape_ == SpectrumShape::Sinc2) {
    const double lobe = kPi / width_parameter();
    sinc_lobes_ = std::clamp(static_cast<int>(kMaxSupportFraction * center_omega() / lobe), kMinSincLobes,
                             kMaxSincLobes);
  }
  if (support_half_width() >= center_omega()) {
    throw ValidationError("correlation_time: spectrum would extend to non-positive frequencies");
  }
  if (shape_ == SpectrumShape::Sinc2) {
    // Renormalize over the truncated support.
    std::vector<double> nodes, weights;
    composite_gauss(support_half_width(), 8 * sinc_lobes_, nodes, weights);
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) total += weights[i] * density(nodes[i]);
    norm_ = 1.0 / total;
  }
}

PhotonPairSpectrum PhotonPairSpectrum::degenerate_at(double center_wavelength_nm,
                                                     double correlation_time_fs, SpectrumShape shape) {
  return PhotonPairSpectrum(0.5 * center_wavelength_nm, correlation_time_fs, shape);
}

double PhotonPairSpectrum::width_parameter() const {
  // Gaussian: the unit-transmission dip is exp(-2 sigma^2 tau^2), RMS width 1/(2 sigma).
  // Sinc^2 with |f|^2 ~ sinc^2(a Omega): triangular dip of half-width a, RMS width a/sqrt(6).
  if (shape_ == SpectrumShape::Gaussian) return 0.5 / correlation_time_fs_;
  return std::sqrt(6.0) * correlation_time_fs_;
}

double PhotonPairSpectrum::support_half_width() const {
  if (shape_ == SpectrumShape::Gaussian) return kGaussianSupportSigmas * width_parameter();
  return sinc_lobes_ * kPi / width_parameter();
}

double PhotonPairSpectrum::density(double detuning) const {
  if (std::abs(detuning) > support_half_width()) return 0.0;
  if (shape_ == SpectrumShape::Gaussian) {
    const double sigma = width_parameter();
    return std::exp(-0.5 * detuning * detuning / (sigma * sigma)) / (std::sqrt(2.0 * kPi) * sigma);
  }
  const double a = width_parameter();
  const double s = sinc(a * detuning);
  return norm_ * a / kPi * s * s;
}

BarrierResponse BarrierResponse::constant(Complex value) {
  return {[value](double) { return value; }};
}

BarrierResponse BarrierResponse::relative_to_air(const LayerStack& stack, double angle_rad,
                                                 Polarization pol) {
  if (stack.empty() && stack.exit_medium() == stack.incident_medium()) return constant(1.0);
  const LayerStack air = air_reference(stack);
  return {[stack, air, angle_rad, pol](double omega) {
    return transmission_at(stack, omega, angle_rad, pol) / transmission_at(air, omega, angle_rad, pol);
  }};
}

BarrierResponse BarrierResponse::tabulated(std::vector<double> omegas, std::vector<Complex> values) {
  if (omegas.size() < 2 || omegas.size() != values.size()) {
    throw ValidationError("barrier table: need at least two (omega, t) samples of equal length");
  }
  if (!std::is_sorted(omegas.begin(), omegas.end())) {
    throw ValidationError("barrier table: omegas must be ascending");
  }
  const double lo = omegas.front();
  const double hi = omegas.back();
  return {[omegas = std::move(omegas), values = std::move(values)](double omega) {
            auto it = std::upper_bound(omegas.begin(), omegas.end(), omega);
            std::size_t i = static_cast<std::size_t>(std::distance(omegas.begin(), it));
            i = std::clamp<std::size_t>(i, 1, omegas.size() - 1);
            const double u = (omega - omegas[i - 1]) / (omegas[i] - omegas[i - 1]);
            return (1.0 - u) * values[i - 1] + u * values[i];
          },
          lo, hi};
}

CoincidenceModel::CoincidenceModel(const PhotonPairSpectrum& spectrum, const BarrierResponse& barrier,
                                   double max_abs_delay_fs) {
  const double w0 = spectrum.center_omega();
  const double half = spectrum.support_half_width();
  if (w0 - half < barrier.omega_min || w0 + half > barrier.omega_max) {
    throw ValidationError("transmission table under-sampled");
  }
  max_abs_delay_fs = std::abs(max_abs_delay_fs);

  const std::array<double, 5> probes{-max_abs_delay_fs, -0.5 * max_abs_delay_fs, 0.0,
                                     0.5 * max_abs_delay_fs, max_abs_delay_fs};
  auto probe_rates = [&] {
    std::array<double, 5> out{};
    for (std::size_t i = 0; i < probes.size(); ++i) out[i] = rate(probes[i]);
    return out;
  };

  // Two panels per sinc^2 lobe to start with.
  int panels = spectrum.shape() == SpectrumShape::Sinc2
                   ? 2 * static_cast<int>(std::lround(spectrum.support_half_width() * spectrum.width_parameter() / kPi))
                   : 8;
  tabulate(spectrum, barrier, panels);
  auto previous = probe_rates();
  double previous_plateau = plateau_;
  for (int refinement = 0; refinement < 6; ++refinement) {
    panels *= 2;
    tabulate(spectrum, barrier, panels);
    const auto current = probe_rates();
    double change = std::abs(plateau_ - previous_plateau) / plateau_;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      change = std::max(change, std::abs(current[i] - previous[i]));
    }
    if (change < 1e-12) return;
    previous = current;
    previous_plateau = plateau_;
  }
}

void CoincidenceModel::tabulate(const PhotonPairSpectrum& spectrum, const BarrierResponse& barrier,
                                int panels) {
  std::vector<double> weights;
  composite_gauss(spectrum.support_half_width(), panels, detuning_, weights);
  const double w0 = spectrum.center_omega();
  weight_.resize(detuning_.size());
  cross_.resize(detuning_.size());
  double plateau = 0.0;
  for (std::size_t i = 0; i < detuning_.size(); ++i) {
    const double omega_shift = detuning_[i];
    const Complex upper = barrier.t(w0 + omega_shift);
    const Complex lower = barrier.t(w0 - omega_shift);
    weight_[i] = weights[i] * spectrum.density(omega_shift);
    cross_[i] = upper * std::conj(lower);
    plateau += weight_[i] * 0.5 * (std::norm(upper) + std::norm(lower));
  }
  if (!(plateau > 0.0)) throw NumericalError("coincidence model: barrier blocks the whole spectrum");
  plateau_ = plateau;
}

double CoincidenceModel::rate(double delay_fs) const {
  double interference = 0.0;
  for (std::size_t i = 0; i < detuning_.size(); ++i) {
    const double phase = -2.0 * detuning_[i] * delay_fs;
    interference += weight_[i] * (cross_[i] * Complex(std::cos(phase), std::sin(phase))).real();
  }
  return 1.0 - interference / plateau_;
}

double coincidence_rate(const PhotonPairSpectrum& spectrum, const BarrierResponse& barrier,
                        double relative_delay_fs) {
  return CoincidenceModel(spectrum, barrier, relative_delay_fs).rate(relative_delay_fs);
}

double prism_position_um(double delay_fs) { return 0.5 * delay_fs * kSpeedOfLight * 1e-3; }

double delay_from_prism_um(double position_um) { return 2.0 * position_um * 1e3 / kSpeedOfLight; }

std::vector<double> DipTrace::prism_positions_um() const {
  std::vector<double> out;
  out.reserve(delays_fs.size());
  for (double tau : delays_fs) out.push_back(prism_position_um(tau));
  return out;
}

double parabolic_dip_center(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("dip fit: x and y lengths differ");
  const auto min_it = std::min_element(y.begin(), y.end());
  const std::size_t m = static_cast<std::size_t>(std::distance(y.begin(), min_it));
  if (m < 2 || m + 2 >= y.size()) throw NumericalError("dip not bracketed");

  const double h = x[m + 1] - x[m];
  bool uniform = h > 0.0;
  for (std::size_t k = m - 2; k < m + 2; ++k) {
    uniform = uniform && std::abs((x[k + 1] - x[k]) - h) <= 1e-9 * std::abs(h);
  }

  double slope, curvature;  // of y = c0 + slope u + curvature u^2, u = x - x[m]
  if (uniform) {
    slope = ((y[m + 1] - y[m - 1]) + 2.0 * (y[m + 2] - y[m - 2])) / (10.0 * h);
    curvature = (2.0 * (y[m - 2] + y[m + 2]) - (y[m - 1] + y[m + 1]) - 2.0 * y[m]) / (14.0 * h * h);
  } else {
    // Normal equations for a quadratic in u over the 5-point window.
    double s[5] = {0, 0, 0, 0, 0};
    double t[3] = {0, 0, 0};
    for (std::size_t k = m - 2; k <= m + 2; ++k) {
      const double u = x[k] - x[m];
      double p = 1.0;
      for (int e = 0; e < 5; ++e, p *= u) s[e] += p;
      t[0] += y[k];
      t[1] += u * y[k];
      t[2] += u * u * y[k];
    }
    // Cramer's rule on [[s0 s1 s2][s1 s2 s3][s2 s3 s4]] (c0, slope, curvature) = t.
    auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double hh,
                   double i) { return a * (e * i - f * hh) - b * (d * i - f * g) + c * (d * hh - e * g); };
    const double det = det3(s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
    slope = det3(s[0], t[0], s[2], s[1], t[1], s[3], s[2], t[2], s[4]) / det;
    curvature = det3(s[0], s[1], t[0], s[1], s[2], t[1], s[2], s[3], t[2]) / det;
  }
  if (!(curvature > 0.0)) return x[m];
  const double offset = -slope / (2.0 * curvature);
  return x[m] + std::clamp(offset, x[m - 2] - x[m], x[m + 2] - x[m]);
}

DipTrace trace_dip(const PhotonPairSpectrum& spectrum, const BarrierResponse& barrier,
                   std::span<const double> delays_fs, unsigned threads) {
  if (delays_fs.size() < 5) throw ValidationError("delays: need at least 5 samples");
  double max_abs = 0.0;
  for (double tau : delays_fs) {
    if (!std::isfinite(tau)) throw ValidationError("delays: must be finite");
    max_abs = std::max(max_abs, std::abs(tau));
  }
  const CoincidenceModel model(spectrum, barrier, max_abs);

  DipTrace trace;
  trace.delays_fs.assign(delays_fs.begin(), delays_fs.end());
  trace.rates.resize(delays_fs.size());
  parallel_for(delays_fs.size(), threads, [&](std::size_t i) { trace.rates[i] = model.rate(delays_fs[i]); });

  trace.dip_center_fs = parabolic_dip_center(trace.delays_fs, trace.rates);
  trace.visibility = 1.0 - *std::min_element(trace.rates.begin(), trace.rates.end());
  return trace;
}

std::vector<double> delay_grid(double from_fs, double to_fs, double step_fs) {
  if (!(step_fs > 0.0) || !std::isfinite(from_fs) || !std::isfinite(to_fs) || to_fs < from_fs) {
    throw ValidationError("delay grid: need from <= to and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((to_fs - from_fs) / step_fs + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = from_fs + static_cast<double>(i) * step_fs;
  return grid;
}

NarrowbandCheck dip_versus_group_delay(const PhotonPairSpectrum& spectrum, const LayerStack& stack,
                                       double angle_rad, Polarization pol, unsigned threads) {
  const OperatingPoint point{spectrum.center_wavelength_nm(), angle_rad, pol};
  NarrowbandCheck out;
  out.group_delay_fs = delay_report(stack, point).relative_group_delay_fs;

  const double tc = spectrum.correlation_time_fs();
  const double step = tc / 100.0;
  std::vector<double> grid(1001);
  for (int i = 0; i < 1001; ++i) grid[static_cast<std::size_t>(i)] = (i - 500) * step;
  const auto trace = trace_dip(spectrum, BarrierResponse::relative_to_air(stack, angle_rad, pol), grid, threads);
  out.dip_shift_fs = trace.dip_center_fs;
  out.difference_fs = out.dip_shift_fs - out.group_delay_fs;
  return out;
}

NarrowbandCheck narrowband_check(const PhotonPairSpectrum& spectrum, const LayerStack& stack,
                                 double angle_rad, Polarization pol) {
  if (spectrum.correlation_time_fs() < 100.0) {
    throw ValidationError("narrowband check: correlation_time must be >= 100 fs");
  }
  return dip_versus_group_delay(spectrum, stack, angle_rad, pol);
}

}  // namespace bandgap
