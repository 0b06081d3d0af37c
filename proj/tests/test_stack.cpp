#include <doctest.h>

#include <cmath>
#include <random>

#include "bandgap/stack.hpp"
#include "bandgap/stack_io.hpp"

using namespace bandgap;

TEST_CASE("quarter-wave mirror of 692 nm design") {
  const auto stack = build_quarter_wave_stack(692.0, 2.22, 1.41, 11, FirstLayer::High);
  REQUIRE(stack.size() == 11);
  for (std::size_t j = 0; j < stack.size(); ++j) {
    const auto& layer = stack.layers()[j];
    CHECK(layer.refractive_index.real() == (j % 2 == 0 ? 2.22 : 1.41));
    CHECK(layer.refractive_index.real() * layer.thickness_nm == doctest::Approx(173.0).epsilon(1e-15));
  }
  CHECK(stack.layers()[0].thickness_nm == doctest::Approx(77.93).epsilon(1e-4));
  CHECK(stack.layers()[1].thickness_nm == doctest::Approx(122.70).epsilon(1e-4));
  CHECK(stack.total_thickness() == doctest::Approx(1081.04).epsilon(1e-5));
  CHECK(stack.incident_medium() == Complex(1.0));
  CHECK(stack.exit_medium() == Complex(1.0));
}

TEST_CASE("quarter-wave degenerate cases") {
  const auto slab = build_quarter_wave_stack(600.0, 1.5, 1.5, 1, FirstLayer::High);
  REQUIRE(slab.size() == 1);
  CHECK(slab.layers()[0].thickness_nm == doctest::Approx(100.0));

  const auto pair = build_quarter_wave_stack(692.0, 2.22, 1.41, 2, FirstLayer::High);
  CHECK(pair.total_thickness() == doctest::Approx(77.928 + 122.695).epsilon(1e-5));

  const auto low_first = build_quarter_wave_stack(692.0, 2.22, 1.41, 3, FirstLayer::Low);
  CHECK(low_first.layers()[0].refractive_index.real() == 1.41);
  CHECK(low_first.layers()[1].refractive_index.real() == 2.22);
}

TEST_CASE("quarter-wave validation names the field") {
  auto message_of = [](auto&& fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of([] { build_quarter_wave_stack(0.0, 2.22, 1.41, 11, FirstLayer::High); })
            .find("design_wavelength") != std::string::npos);
  CHECK(message_of([] { build_quarter_wave_stack(692.0, -1.0, 1.41, 11, FirstLayer::High); })
            .find("n_high") != std::string::npos);
  CHECK(message_of([] { build_quarter_wave_stack(692.0, 2.22, 0.0, 11, FirstLayer::High); })
            .find("n_low") != std::string::npos);
  CHECK(message_of([] { build_quarter_wave_stack(692.0, 2.22, 1.41, 0, FirstLayer::High); })
            .find("layer_count") != std::string::npos);
}

TEST_CASE("layer invariants are enforced") {
  CHECK_THROWS_AS(LayerStack({{Complex(1.5), -1.0}}), ValidationError);
  CHECK_THROWS_AS(LayerStack({{Complex(1.5, -0.1), 10.0}}), ValidationError);
  CHECK_THROWS_AS(LayerStack({{Complex(0.0), 10.0}}), ValidationError);
  CHECK_NOTHROW(LayerStack({{Complex(1.5, 0.1), 0.0}}));
}

TEST_CASE("total thickness is the exact layer sum") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(1.0, 500.0);
  std::vector<Layer> layers;
  double sum = 0.0;
  for (int j = 0; j < 17; ++j) {
    layers.push_back({Complex(1.7), d(rng)});
    sum += layers.back().thickness_nm;
  }
  CHECK(LayerStack(layers).total_thickness() == sum);
}

TEST_CASE("perturbation") {
  const auto mirror = build_quarter_wave_stack(692.0, 2.22, 1.41, 11, FirstLayer::High);

  SUBCASE("zero sigma is the identity") { CHECK(perturb_thicknesses(mirror, 0.0, 99) == mirror); }

  SUBCASE("fixed seed is deterministic, indices untouched") {
    const auto a = perturb_thicknesses(mirror, 0.02, 1);
    const auto b = perturb_thicknesses(mirror, 0.02, 1);
    CHECK(a == b);
    CHECK(a != perturb_thicknesses(mirror, 0.02, 2));
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a.layers()[j].refractive_index == mirror.layers()[j].refractive_index);
    }
  }

  SUBCASE("ensemble mean of total thickness is unbiased") {
    double sum = 0.0;
    constexpr int n = 10000;
    for (int s = 0; s < n; ++s) sum += perturb_thicknesses(mirror, 0.02, static_cast<std::uint64_t>(s)).total_thickness();
    CHECK(std::abs(sum / n - mirror.total_thickness()) < 0.005 * mirror.total_thickness());
  }

  SUBCASE("large sigma stays positive with a 1% floor") {
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto p = perturb_thicknesses(mirror, 0.49, s);
      for (std::size_t j = 0; j < p.size(); ++j) {
        CHECK(p.layers()[j].thickness_nm >= 0.01 * mirror.layers()[j].thickness_nm);
      }
    }
  }

  SUBCASE("sigma range") {
    CHECK_THROWS_AS(perturb_thicknesses(mirror, -0.1, 1), ValidationError);
    CHECK_THROWS_AS(perturb_thicknesses(mirror, 0.5, 1), ValidationError);
  }
}

TEST_CASE("air reference") {
  const auto mirror = build_quarter_wave_stack(692.0, 2.22, 1.41, 11, FirstLayer::High);
  const auto air = air_reference(mirror);
  CHECK(air.empty());
  CHECK(air.air_gap_nm() == doctest::Approx(1081.04).epsilon(1e-5));
  CHECK(air.physical_length() == mirror.total_thickness());
  CHECK(air_reference(air).air_gap_nm() == air.air_gap_nm());

  CHECK(air_reference(LayerStack{}).air_gap_nm() == 0.0);
  CHECK(air_reference(LayerStack({{Complex(1.5), 100.0}})).air_gap_nm() == 100.0);
}

TEST_CASE("operating point validation") {
  CHECK_NOTHROW(validate(OperatingPoint{702.0, 0.0, Polarization::P}));
  CHECK_THROWS_AS(validate(OperatingPoint{0.0, 0.0, Polarization::P}), ValidationError);
  CHECK_THROWS_AS(validate(OperatingPoint{702.0, kPi / 2, Polarization::P}), ValidationError);
  CHECK_THROWS_AS(validate(OperatingPoint{702.0, -0.1, Polarization::S}), ValidationError);
  CHECK_THROWS_AS(validate(OperatingPoint{std::nan(""), 0.0, Polarization::S}), ValidationError);
  CHECK(OperatingPoint{692.0, 0.0, Polarization::P}.omega() == doctest::Approx(2.72205).epsilon(1e-5));
}

TEST_CASE("stack JSON accepts both forms") {
  const auto shorthand = stack_from_json(nlohmann::json::parse(R"({
    "quarter_wave": {"lambda0_nm": 692, "n_high": 2.22, "n_low": 1.41, "count": 11, "first": "high"}
  })"));
  CHECK(shorthand == build_quarter_wave_stack(692.0, 2.22, 1.41, 11, FirstLayer::High));

  const auto explicit_form = stack_from_json(nlohmann::json::parse(R"({
    "incident_medium": 1.0, "exit_medium": {"n": 1.52, "k": 0.001},
    "layers": [ {"n": 2.22, "d_nm": 77.93}, {"n": 1.41, "d_nm": 122.70, "k": 0.0002} ]
  })"));
  REQUIRE(explicit_form.size() == 2);
  CHECK(explicit_form.exit_medium() == Complex(1.52, 0.001));
  CHECK(explicit_form.layers()[1].refractive_index == Complex(1.41, 0.0002));

  CHECK_THROWS_AS(stack_from_json(nlohmann::json::parse(R"({"layers": [{"n": 2.0}]})")), ValidationError);
  CHECK_THROWS_AS(stack_from_json(nlohmann::json::parse(R"({"layers": 3})")), ValidationError);
  CHECK_THROWS_AS(stack_from_json(nlohmann::json::parse(R"({"quarter_wave": {"lambda0_nm": 692,
      "n_high": 2.22, "n_low": 1.41, "count": 11, "first": "middle"}})")),
                  ValidationError);
}

TEST_CASE("stack JSON round trip is lossless for random stacks") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> n(1.0, 3.0), d(0.0, 500.0), k(0.0, 0.1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Layer> layers;
    const int count = 1 + static_cast<int>(rng() % 20);
    for (int j = 0; j < count; ++j) layers.push_back({Complex(n(rng), trial % 3 == 0 ? k(rng) : 0.0), d(rng)});
    auto stack = LayerStack(layers, n(rng), Complex(n(rng), k(rng)), "trial " + std::to_string(trial));
    if (trial % 5 == 0) stack = stack.with_air_gap(d(rng));
    const auto text = stack_to_json(stack).dump();
    CHECK(stack_from_json(nlohmann::json::parse(text)) == stack);
  }
}
