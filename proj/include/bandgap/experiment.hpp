#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bandgap/delay.hpp"
#include "bandgap/hom.hpp"
#include "bandgap/stack.hpp"
#include "bandgap/transfer_matrix.hpp"

namespace bandgap {

enum class Command { Spectrum, ScanAngle, HomDip, Perturb };
enum class OutputFormat { Csv, Json };

const char* to_string(Command command);
Command parse_command(const std::string& text);

/// Where the barrier comes from: a stack file, or the quarter-wave shorthand.
struct StackSource {
  std::optional<std::string> path;
  QuarterWaveDesign design;

  LayerStack resolve() const;
  friend bool operator==(const StackSource&, const StackSource&) = default;
};

struct ExperimentConfig {
  Command command = Command::ScanAngle;
  StackSource stack;

  double lambda_nm = 702.0;
  double angle_deg = 0.0;
  Polarization pol = Polarization::P;

  // spectrum
  double from_nm = 550.0;
  double to_nm = 850.0;
  double step_nm = 0.5;

  // scan-angle
  double from_deg = 0.0;
  double to_deg = 70.0;
  double step_deg = 1.0;

  // hom-dip
  double tc_fs = 15.0;
  SpectrumShape shape = SpectrumShape::Gaussian;
  double from_fs = -40.0;
  double to_fs = 40.0;
  double step_fs = 0.25;
  bool prism_microns = false;

  // perturb
  double sigma = 0.02;
  int samples = 1000;
  std::uint64_t seed = 1;

  std::string output_path;  // empty: stdout
  OutputFormat format = OutputFormat::Csv;
  unsigned threads = 0;     // 0: all cores
  int max_flagged = 0;      // numerical-failure rows tolerated before exit code 2

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Rejects any parameter outside the domain of the operation it feeds.
void validate(const ExperimentConfig& config);

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Inclusive evenly spaced range; the last sample is clamped to `to`.
std::vector<double> linear_range(double from, double to, double step);

// ---- output ---------------------------------------------------------------

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumSample>& samples);
void write_scan_csv(std::ostream& out, const std::vector<DelayReport>& rows);
void write_dip_csv(std::ostream& out, const DipTrace& trace, bool prism_microns = false);
nlohmann::json dip_summary(const DipTrace& trace);
nlohmann::json scan_to_json(const std::vector<DelayReport>& rows);

// ---- perturbation ensemble -----------------------------------------------

struct EnsembleSummary {
  int samples = 0;
  int excluded_opaque = 0;
  double nominal_relative_delay_fs = 0.0;
  double mean_deviation_fs = 0.0;
  double stddev_deviation_fs = 0.0;
  double min_deviation_fs = 0.0;
  double max_deviation_fs = 0.0;
  std::vector<double> deviations_fs;  // per sample, NaN for excluded samples

  friend bool operator==(const EnsembleSummary&, const EnsembleSummary&) = default;
};

nlohmann::json ensemble_to_json(const EnsembleSummary& summary);

/// Seed of sample `index` derived from the base seed in counter mode.
std::uint64_t sample_seed(std::uint64_t base_seed, std::uint64_t index);

/// Relative group delay of thickness-perturbed copies of `stack`, as
/// deviations from the unperturbed value. Output does not depend on `threads`.
EnsembleSummary run_perturbation_ensemble(const LayerStack& stack, double sigma, int n_samples,
                                          const OperatingPoint& point, std::uint64_t base_seed,
                                          unsigned threads = 1);

// ---- figures ---------------------------------------------------------------

struct FigureOptions {
  QuarterWaveDesign mirror;           // design 692 nm by default
  double photon_wavelength_nm = 702.0;
  double correlation_time_fs = 15.0;
  double oblique_angle_deg = 55.0;
  unsigned threads = 0;
};

/// Writes fig2a.csv, fig2b.csv, fig2_summary.json, fig3_theory.csv and
/// fig4_theory.csv into `directory`; returns the written paths.
std::vector<std::filesystem::path> reproduce_figures(const std::filesystem::path& directory,
                                                     const FigureOptions& options = {});

// ---- dispatch ---------------------------------------------------------------

struct RunOutcome {
  int flagged = 0;  // rows with numerical failures
};

/// Executes a validated config, writing results to `out` (and to a summary
/// JSON next to the output file for hom-dip).
RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& out,
                          std::ostream& summary_out);

}  // namespace bandgap
