#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bandgap/units.hpp"

namespace bandgap {

using Complex = std::complex<double>;

/// Homogeneous layer. Absorbing media have Im(n) > 0.
struct Layer {
  Complex refractive_index{1.0, 0.0};
  double thickness_nm = 0.0;

  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Ordered multilayer between two semi-infinite ambient media.
///
/// A stack with no layers is the free-propagation reference: it carries an
/// `air_gap_nm` of incident-medium propagation so that it can stand in for
/// "an equal thickness of air" next to a real barrier.
class LayerStack {
 public:
  LayerStack() = default;
  LayerStack(std::vector<Layer> layers, Complex incident_medium = 1.0,
             Complex exit_medium = 1.0, std::string label = {});

  const std::vector<Layer>& layers() const { return layers_; }
  Complex incident_medium() const { return incident_medium_; }
  Complex exit_medium() const { return exit_medium_; }
  const std::string& label() const { return label_; }
  double air_gap_nm() const { return air_gap_nm_; }

  bool empty() const { return layers_.empty(); }
  std::size_t size() const { return layers_.size(); }

  /// Sum of layer thicknesses.
  double total_thickness() const;

  /// Distance between the entrance and exit planes: layers plus air gap.
  double physical_length() const { return total_thickness() + air_gap_nm_; }

  LayerStack with_label(std::string label) const;
  LayerStack with_air_gap(double gap_nm) const;
  LayerStack with_layers(std::vector<Layer> layers) const;

  friend bool operator==(const LayerStack&, const LayerStack&) = default;

 private:
  std::vector<Layer> layers_;
  Complex incident_medium_{1.0, 0.0};
  Complex exit_medium_{1.0, 0.0};
  std::string label_;
  double air_gap_nm_ = 0.0;
};

enum class Polarization { P, S };

Polarization parse_polarization(const std::string& text);
const char* to_string(Polarization pol);

struct OperatingPoint {
  double vacuum_wavelength_nm = 702.0;
  double angle_rad = 0.0;  // in the incident medium, [0, pi/2)
  Polarization polarization = Polarization::P;

  double omega() const { return angular_frequency(vacuum_wavelength_nm); }
  double free_space_k() const { return omega() / kSpeedOfLight; }
};

/// Throws ValidationError if the point is outside its domain.
void validate(const OperatingPoint& point);

enum class FirstLayer { High, Low };

struct QuarterWaveDesign {
  double design_wavelength_nm = 692.0;
  double n_high = 2.22;
  double n_low = 1.41;
  int layer_count = 11;
  FirstLayer first_layer = FirstLayer::High;

  friend bool operator==(const QuarterWaveDesign&, const QuarterWaveDesign&) = default;
};

/// Alternating stack with n_j * d_j = design_wavelength / 4 for every layer,
/// free-standing in air.
LayerStack build_quarter_wave_stack(double design_wavelength_nm, double n_high, double n_low,
                                    int layer_count, FirstLayer first_layer);
LayerStack build_quarter_wave_stack(const QuarterWaveDesign& design);

/// Multiplies every thickness by an independent N(1, relative_sigma) factor,
/// floored at 1% of the nominal thickness. Indices are untouched.
LayerStack perturb_thicknesses(const LayerStack& stack, double relative_sigma, std::uint64_t seed);

/// Empty stack spanning the same entrance-to-exit distance in the incident medium.
LayerStack air_reference(const LayerStack& stack);

}  // namespace bandgap
