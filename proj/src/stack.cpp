#include "bandgap/stack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace bandgap {

namespace {

void check_index(Complex n, const std::string& field) {
  if (!std::isfinite(n.real()) || !std::isfinite(n.imag()) || n.real() <= 0.0 || n.imag() < 0.0) {
    throw ValidationError(field + ": refractive index must have Re(n) > 0 and Im(n) >= 0");
  }
}

}  // namespace

LayerStack::LayerStack(std::vector<Layer> layers, Complex incident_medium, Complex exit_medium,
                       std::string label)
    : layers_(std::move(layers)),
      incident_medium_(incident_medium),
      exit_medium_(exit_medium),
      label_(std::move(label)) {
  check_index(incident_medium_, "incident_medium");
  check_index(exit_medium_, "exit_medium");
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    const auto& layer = layers_[j];
    check_index(layer.refractive_index, "layers[" + std::to_string(j) + "].n");
    if (!std::isfinite(layer.thickness_nm) || layer.thickness_nm < 0.0) {
      throw ValidationError("layers[" + std::to_string(j) + "].d_nm: thickness must be >= 0");
    }
  }
}

double LayerStack::total_thickness() const {
  return std::accumulate(layers_.begin(), layers_.end(), 0.0,
                         [](double acc, const Layer& l) { return acc + l.thickness_nm; });
}

LayerStack LayerStack::with_label(std::string label) const {
  LayerStack copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

LayerStack LayerStack::with_air_gap(double gap_nm) const {
  if (!std::isfinite(gap_nm) || gap_nm < 0.0) {
    throw ValidationError("air_gap_nm: must be finite and >= 0");
  }
  LayerStack copy = *this;
  copy.air_gap_nm_ = gap_nm;
  return copy;
}

LayerStack LayerStack::with_layers(std::vector<Layer> layers) const {
  LayerStack copy(std::move(layers), incident_medium_, exit_medium_, label_);
  copy.air_gap_nm_ = air_gap_nm_;
  return copy;
}

Polarization parse_polarization(const std::string& text) {
  if (text == "p" || text == "P" || text == "tm" || text == "TM") return Polarization::P;
  if (text == "s" || text == "S" || text == "te" || text == "TE") return Polarization::S;
  throw ValidationError("polarization: expected 'p' or 's', got '" + text + "'");
}

const char* to_string(Polarization pol) { return pol == Polarization::P ? "p" : "s"; }

void validate(const OperatingPoint& point) {
  if (!std::isfinite(point.vacuum_wavelength_nm) || point.vacuum_wavelength_nm <= 0.0) {
    throw ValidationError("vacuum_wavelength: must be finite and > 0");
  }
  if (!std::isfinite(point.angle_rad) || point.angle_rad < 0.0 || point.angle_rad >= kPi / 2) {
    throw ValidationError("angle_of_incidence: must lie in [0, pi/2)");
  }
}

LayerStack build_quarter_wave_stack(double design_wavelength_nm, double n_high, double n_low,
                                    int layer_count, FirstLayer first_layer) {
  if (!(design_wavelength_nm > 0.0) || !std::isfinite(design_wavelength_nm)) {
    throw ValidationError("design_wavelength: must be > 0");
  }
  if (!(n_high > 0.0) || !std::isfinite(n_high)) throw ValidationError("n_high: must be > 0");
  if (!(n_low > 0.0) || !std::isfinite(n_low)) throw ValidationError("n_low: must be > 0");
  if (layer_count < 1) throw ValidationError("layer_count: must be >= 1");

  std::vector<Layer> layers;
  layers.reserve(static_cast<std::size_t>(layer_count));
  bool high = first_layer == FirstLayer::High;
  for (int j = 0; j < layer_count; ++j, high = !high) {
    const double n = high ? n_high : n_low;
    layers.push_back({Complex(n, 0.0), design_wavelength_nm / (4.0 * n)});
  }
  return LayerStack(std::move(layers), 1.0, 1.0,
                    "quarter-wave " + std::to_string(layer_count) + " layers");
}

LayerStack build_quarter_wave_stack(const QuarterWaveDesign& design) {
  return build_quarter_wave_stack(design.design_wavelength_nm, design.n_high, design.n_low,
                                  design.layer_count, design.first_layer);
}

LayerStack perturb_thicknesses(const LayerStack& stack, double relative_sigma, std::uint64_t seed) {
  if (!(relative_sigma >= 0.0 && relative_sigma < 0.5)) {
    throw ValidationError("relative_sigma: must lie in [0, 0.5)");
  }
  if (relative_sigma == 0.0) return stack;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> factor(1.0, relative_sigma);
  std::vector<Layer> layers = stack.layers();
  for (auto& layer : layers) {
    layer.thickness_nm = std::max(layer.thickness_nm * factor(rng), 0.01 * layer.thickness_nm);
  }
  return stack.with_layers(std::move(layers));
}

LayerStack air_reference(const LayerStack& stack) {
  LayerStack ref({}, stack.incident_medium(), stack.incident_medium(), "air reference");
  return ref.with_air_gap(stack.physical_length());
}

}  // namespace bandgap
