#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bandgap/transfer_matrix.hpp"

using namespace bandgap;

namespace {

const LayerStack kMirror = build_quarter_wave_stack(692.0, 2.22, 1.41, 11, FirstLayer::High);

// Closed-form midgap transmittance of the free-standing H(LH)^m stack at
// normal incidence. Every layer is a quarter wave, so each characteristic
// matrix is [[0, -i/n], [-i n, 0]] and the stack presents the admittance
// Y = n_H^(2m+2) / n_L^(2m) to air; T = 4Y / (1 + Y)^2.
double quarter_wave_midgap_transmittance(double n_high, double n_low, int m) {
  const double y = std::pow(n_high, 2 * m + 2) / std::pow(n_low, 2 * m);
  return 4.0 * y / ((1.0 + y) * (1.0 + y));
}

// Airy formula for a single slab between identical ambient media, built from
// interface Fresnel coefficients in the tangential-field convention.
Complex airy_slab_t(Complex n_amb, Complex n_slab, double d_nm, double lambda_nm, double theta, Polarization pol) {
  const double beta = n_amb.real() * std::sin(theta);
  auto eta = [&](Complex n) {
    const Complex q = std::sqrt(n * n - beta * beta);
    return pol == Polarization::S ? q : n * n / q;
  };
  const Complex e1 = eta(n_amb), e2 = eta(n_slab);
  const Complex r12 = (e1 - e2) / (e1 + e2);
  const Complex r23 = (e2 - e1) / (e2 + e1);
  const Complex t12 = 2.0 * e1 / (e1 + e2);
  const Complex t23 = 2.0 * e2 / (e2 + e1);
  const Complex delta = 2.0 * kPi / lambda_nm * std::sqrt(n_slab * n_slab - beta * beta) * d_nm;
  const Complex phase = std::exp(Complex(0.0, 1.0) * delta);
  return t12 * t23 * phase / (1.0 + r12 * r23 * phase * phase);
}

LayerStack random_stack(std::mt19937_64& rng, int max_layers = 20) {
  std::uniform_real_distribution<double> n(1.0, 3.0), d(10.0, 500.0);
  std::vector<Layer> layers;
  const int count = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_layers));
  for (int j = 0; j < count; ++j) layers.push_back({Complex(n(rng)), d(rng)});
  return LayerStack(layers);
}

LayerStack reversed(const LayerStack& stack) {
  std::vector<Layer> layers(stack.layers().rbegin(), stack.layers().rend());
  return LayerStack(layers, stack.exit_medium(), stack.incident_medium());
}

double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("closed-form midgap oracle fixture") {
  // Frozen from the admittance formula above before the matrix core was trusted.
  const double t_oracle = quarter_wave_midgap_transmittance(2.22, 1.41, 5);
  CHECK(t_oracle == doctest::Approx(0.00863246470154214).epsilon(1e-13));  // 30-digit evaluation
  const auto s = scattering(kMirror, {692.0, 0.0, Polarization::P});
  CHECK(std::abs(s.transmittance - t_oracle) / t_oracle < 1e-10);
  CHECK(s.transmittance > 0.005);
  CHECK(s.transmittance < 0.02);
}

TEST_CASE("single interface Fresnel amplitudes") {
  const LayerStack interface({}, 1.0, 1.5);
  for (auto pol : {Polarization::P, Polarization::S}) {
    const auto s = scattering(interface, {600.0, 0.0, pol});
    CHECK(std::abs(s.r - Complex(-0.2)) < 1e-15);
    CHECK(std::abs(s.t - Complex(0.8)) < 1e-15);
    CHECK(s.transmittance + s.reflectance == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("stopband of the 692 nm mirror") {
  std::vector<double> wl;
  for (double x = 550.0; x <= 850.0 + 1e-9; x += 0.5) wl.push_back(x);
  const auto sweep = transmission_spectrum(kMirror, wl, 0.0, Polarization::P);
  for (const auto& s : sweep) {
    if (s.wavelength_nm >= 620.0 && s.wavelength_nm <= 780.0) CHECK(s.transmittance < 0.05);
  }
  CHECK(sweep.front().transmittance > 0.5);
  CHECK(sweep.back().transmittance > 0.5);
}

TEST_CASE("empty stack is free propagation") {
  const auto air = air_reference(kMirror);
  std::vector<double> wl;
  for (double x = 500.0; x <= 900.0; x += 10.0) wl.push_back(x);
  const auto sweep = transmission_spectrum(air, wl, deg_to_rad(30.0), Polarization::S);
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    CHECK(sweep[i].transmittance == doctest::Approx(1.0).epsilon(1e-14));
    const double expected = angular_frequency(wl[i]) / kSpeedOfLight * air.air_gap_nm() * std::cos(deg_to_rad(30.0));
    CHECK(sweep[i].phi_t == doctest::Approx(expected).epsilon(1e-12));
    // ascending wavelength is descending frequency
    if (i > 0) CHECK(sweep[i].phi_t < sweep[i - 1].phi_t);
  }
}

TEST_CASE("single slab matches the Airy closed form and peaks at resonance") {
  const Complex n_slab = 1.5;
  const double d = 500.0;
  const LayerStack slab({{n_slab, d}});
  for (double theta : {0.0, deg_to_rad(40.0)}) {
    for (auto pol : {Polarization::P, Polarization::S}) {
      for (double lambda : {480.0, 523.7, 600.0, 750.0}) {
        const auto s = scattering(slab, {lambda, theta, pol});
        CHECK(rel_err(s.t, airy_slab_t(1.0, n_slab, d, lambda, theta, pol)) < 1e-12);
      }
      // 2 n d cos(theta_inside) = m lambda gives unit transmission
      const double cos_in = std::sqrt(1.0 - std::pow(std::sin(theta) / 1.5, 2));
      for (int m = 2; m <= 4; ++m) {
        const double lambda = 2.0 * 1.5 * d * cos_in / m;
        CHECK(transmittance(slab, {lambda, theta, pol}) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Bloch analysis of the HL cell") {
  const LayerStack cell({kMirror.layers()[0], kMirror.layers()[1]});

  SUBCASE("midgap: cos(K period) = -(nH/nL + nL/nH)/2, kappa period = ln(nH/nL)") {
    const auto b = bloch_analysis(cell, {692.0, 0.0, Polarization::P});
    const double half_trace = -0.5 * (2.22 / 1.41 + 1.41 / 2.22);
    CHECK(b.half_trace.real() == doctest::Approx(half_trace).epsilon(1e-13));
    CHECK(half_trace == doctest::Approx(-1.10476).epsilon(1e-4));
    CHECK(b.in_gap);
    CHECK(b.kappa * b.period_nm == doctest::Approx(std::acosh(-half_trace)).epsilon(1e-12));
    CHECK(b.kappa * b.period_nm == doctest::Approx(std::log(2.22 / 1.41)).epsilon(1e-12));
    CHECK(b.quasimomentum.real() * b.period_nm == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(b.period_nm == doctest::Approx(200.63).epsilon(1e-4));
  }

  SUBCASE("far outside the gap") {
    const auto b = bloch_analysis(cell, {1400.0, 0.0, Polarization::P});
    CHECK(std::abs(b.half_trace.real()) < 1.0);
    CHECK_FALSE(b.in_gap);
    CHECK(b.kappa < 1e-12);
  }

  SUBCASE("no contrast, no gap") {
    const LayerStack uniform({{Complex(1.8), 90.0}, {Complex(1.8), 120.0}});
    for (double lambda : {400.0, 692.0, 756.0, 1500.0}) {
      const auto b = bloch_analysis(uniform, {lambda, 0.3, Polarization::S});
      CHECK_FALSE(b.in_gap);
      CHECK(b.kappa < 1e-7);
    }
  }

  SUBCASE("zero-thickness cell") {
    CHECK_THROWS_AS(bloch_analysis(LayerStack({{Complex(2.0), 0.0}}), {692.0, 0.0, Polarization::P}),
                    ValidationError);
    CHECK_THROWS_AS(bloch_analysis(LayerStack{}, {692.0, 0.0, Polarization::P}), ValidationError);
  }

  SUBCASE("gap criterion tracks |trace|/2 > 1") {
    for (double lambda = 500.0; lambda < 1000.0; lambda += 7.3) {
      const auto b = bloch_analysis(cell, {lambda, 0.2, Polarization::P});
      if (std::abs(std::abs(b.half_trace.real()) - 1.0) > 1e-9) {
        CHECK(b.in_gap == (std::abs(b.half_trace.real()) > 1.0));
      }
    }
  }
}

TEST_CASE("energy conservation over random lossless stacks") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lambda(400.0, 1200.0), angle(0.0, deg_to_rad(89.0));
  for (int trial = 0; trial < 2000; ++trial) {
    const auto stack = random_stack(rng);
    const OperatingPoint point{lambda(rng), angle(rng), trial % 2 ? Polarization::P : Polarization::S};
    const auto s = scattering(stack, point);
    CHECK(std::abs(s.transmittance + s.reflectance - 1.0) < 1e-12);
    CHECK(std::remainder(s.phi_t - std::arg(s.t), 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("reciprocity under layer reversal") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lambda(400.0, 1200.0), angle(0.0, deg_to_rad(80.0));
  for (int trial = 0; trial < 500; ++trial) {
    const auto stack = random_stack(rng);
    const OperatingPoint point{lambda(rng), angle(rng), trial % 2 ? Polarization::P : Polarization::S};
    const auto [t, r] = transmission_reflection(stack, point);
    const auto [t_rev, r_rev] = transmission_reflection(reversed(stack), point);
    CHECK(rel_err(t_rev, t) < 1e-12);
  }
}

TEST_CASE("concatenation equals the two-port cascade") {
  // Redheffer star product of A and B joined through the ambient medium:
  // t_AB = t_A t_B / (1 - r'_A r_B), with r'_A the reflection of A seen from its exit side.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lambda(400.0, 1200.0), angle(0.0, deg_to_rad(80.0));
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_stack(rng, 10);
    const auto b = random_stack(rng, 10);
    std::vector<Layer> joined = a.layers();
    joined.insert(joined.end(), b.layers().begin(), b.layers().end());
    const OperatingPoint point{lambda(rng), angle(rng), trial % 2 ? Polarization::P : Polarization::S};

    const auto [t_a, r_a] = transmission_reflection(a, point);
    const auto [t_a_rev, r_a_back] = transmission_reflection(reversed(a), point);
    const auto [t_b, r_b] = transmission_reflection(b, point);
    const auto [t_ab, r_ab] = transmission_reflection(LayerStack(joined), point);

    const Complex cascade_t = t_a * t_b / (1.0 - r_a_back * r_b);
    const Complex cascade_r = r_a + t_a * t_a_rev * r_b / (1.0 - r_a_back * r_b);
    CHECK(rel_err(t_ab, cascade_t) < 1e-10);
    CHECK(rel_err(r_ab, cascade_r) < 1e-10);
  }
}

TEST_CASE("P and S coincide at normal incidence") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lambda(400.0, 1200.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto stack = random_stack(rng);
    const double wl = lambda(rng);
    const auto p = scattering(stack, {wl, 0.0, Polarization::P});
    const auto s = scattering(stack, {wl, 0.0, Polarization::S});
    CHECK(std::abs(p.t - s.t) < 1e-12);
    CHECK(std::abs(p.r - s.r) < 1e-12);
    CHECK(std::abs(p.phi_t - s.phi_t) < 1e-12);
  }
}

TEST_CASE("evanescent branch") {
  const double theta = deg_to_rad(60.0);  // beyond the 41.8 deg critical angle for 1.5 -> 1.0

  SUBCASE("total internal reflection has |r| = 1") {
    for (auto pol : {Polarization::P, Polarization::S}) {
      const LayerStack tir({{Complex(1.2), 150.0}}, 1.5, 1.0);
      const auto s = scattering(tir, {633.0, theta, pol});
      CHECK(std::abs(s.r) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(s.transmittance == 0.0);
    }
  }

  SUBCASE("frustrated TIR decays monotonically with gap thickness") {
    for (auto pol : {Polarization::P, Polarization::S}) {
      double previous = 1.0;
      for (double gap = 10.0; gap <= 1500.0; gap += 20.0) {
        const LayerStack ftir({{Complex(1.0), gap}}, 1.5, 1.5);
        const auto s = scattering(ftir, {633.0, theta, pol});
        CHECK(s.transmittance < previous);
        CHECK(s.transmittance + s.reflectance == doctest::Approx(1.0).epsilon(1e-12));
        previous = s.transmittance;
      }
    }
  }

  SUBCASE("decaying branch of the longitudinal factor") {
    const Complex q = longitudinal_factor(1.0, 1.3);
    CHECK(q.imag() > 0.0);
    CHECK(std::abs(q.real()) < 1e-15);
    CHECK(longitudinal_factor(2.0, 0.5).real() > 0.0);
  }
}

TEST_CASE("sweep phase agrees with pointwise continuation") {
  std::vector<double> wl;
  for (double x = 560.0; x <= 840.0; x += 2.0) wl.push_back(x);
  for (auto pol : {Polarization::P, Polarization::S}) {
    const auto sweep = transmission_spectrum(kMirror, wl, deg_to_rad(35.0), pol);
    for (std::size_t i = 0; i < sweep.size(); i += 10) {
      const auto s = scattering(kMirror, {wl[i], deg_to_rad(35.0), pol});
      CHECK(sweep[i].phi_t == doctest::Approx(s.phi_t).epsilon(1e-9));
    }
    for (std::size_t i = 1; i < sweep.size(); ++i) CHECK(std::abs(sweep[i].phi_t - sweep[i - 1].phi_t) < kPi);
  }
}

TEST_CASE("coarse sweeps are refined rather than wrapped") {
  // 40 nm steps across a thick stack: adjacent phases would alias without bisection.
  const auto thick = build_quarter_wave_stack(692.0, 2.22, 1.41, 41, FirstLayer::High);
  const std::vector<double> wl{500.0, 540.0, 580.0, 620.0, 660.0, 700.0};
  const auto sweep = transmission_spectrum(thick, wl, 0.0, Polarization::S);
  for (std::size_t i = 0; i < wl.size(); ++i) {
    CHECK(sweep[i].phi_t == doctest::Approx(scattering(thick, {wl[i], 0.0, Polarization::S}).phi_t).epsilon(1e-9));
  }
}

TEST_CASE("spectrum and point validation") {
  const std::vector<double> none;
  CHECK_THROWS_AS(transmission_spectrum(kMirror, none, 0.0, Polarization::P), ValidationError);
  const std::vector<double> unsorted{700.0, 600.0};
  CHECK_THROWS_AS(transmission_spectrum(kMirror, unsorted, 0.0, Polarization::P), ValidationError);
  const std::vector<double> negative{-5.0, 600.0};
  CHECK_THROWS_AS(transmission_spectrum(kMirror, negative, 0.0, Polarization::P), ValidationError);
  CHECK_THROWS_AS(scattering(kMirror, {std::nan(""), 0.0, Polarization::P}), ValidationError);
  CHECK_THROWS_AS(scattering(kMirror, {700.0, INFINITY, Polarization::P}), ValidationError);
}
