#pragma once

#include <cmath>
#include <complex>

namespace bandgap {

struct RichardsonOptions {
  double initial_step = 1e-4;
  double min_step = 1e-8;
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
};

template <class T>
struct DerivativeEstimate {
  T value{};      // Richardson-extrapolated from steps (h, h/2)
  T central{};    // plain central difference at step h
  double step = 0.0;
  bool converged = false;
};

/// Adaptive first derivative. `central_difference(h)` must return
/// (f(x + h) - f(x - h)) / (2h). The step is halved until the central
/// difference at h and the (h, h/2) Richardson value agree to
/// rel_tol * |value| + abs_tol, or the step falls below min_step.
template <class F>
auto richardson_derivative(F&& central_difference, const RichardsonOptions& opts)
    -> DerivativeEstimate<decltype(central_difference(1.0))> {
  using T = decltype(central_difference(1.0));
  double h = opts.initial_step;
  T coarse = central_difference(h);
  while (true) {
    const T fine = central_difference(0.5 * h);
    const T extrapolated = (4.0 * fine - coarse) / 3.0;
    const double gap = std::abs(coarse - extrapolated);
    if (gap <= opts.rel_tol * std::abs(extrapolated) + opts.abs_tol) {
      return {extrapolated, coarse, h, true};
    }
    if (0.5 * h < opts.min_step) return {extrapolated, coarse, h, false};
    h *= 0.5;
    coarse = fine;
  }
}

}  // namespace bandgap
