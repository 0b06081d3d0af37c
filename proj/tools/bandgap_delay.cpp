// bandgap-delay: transmission spectra, tunneling-time angle scans, two-photon
// coincidence dips and thickness-perturbation ensembles for multilayer mirrors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bandgap/experiment.hpp"
#include "bandgap/stack_io.hpp"

namespace {

using namespace bandgap;

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

unsigned threads_from_env() {
  if (const char* env = std::getenv("BANDGAP_DELAY_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value >= 0) return static_cast<unsigned>(value);
    } catch (const std::exception&) {
    }
    throw ValidationError("BANDGAP_DELAY_THREADS: expected a non-negative integer");
  }
  return 0;
}

struct CommonOptions {
  std::string stack_file;
  std::string pol = "p";
  std::string format = "csv";
  std::string first = "high";
  std::string summary_path;
  bool dump_config = false;
  int threads = -1;
};

void add_common(CLI::App* cmd, ExperimentConfig& config, CommonOptions& opts) {
  cmd->add_option("--stack", opts.stack_file, "Stack description JSON (explicit or quarter_wave form)");
  cmd->add_option("--design-nm", config.stack.design.design_wavelength_nm,
                  "Quarter-wave design wavelength when --stack is absent");
  cmd->add_option("--n-high", config.stack.design.n_high, "High index");
  cmd->add_option("--n-low", config.stack.design.n_low, "Low index");
  cmd->add_option("--layers", config.stack.design.layer_count, "Number of layers");
  cmd->add_option("--first", opts.first, "First layer: high or low");
  cmd->add_option("--pol", opts.pol, "Polarization: p or s");
  cmd->add_option("-o,--out", config.output_path, "Output file (default stdout)");
  cmd->add_option("--format", opts.format, "csv or json");
  cmd->add_option("--threads", opts.threads, "Worker threads (0: all cores; env BANDGAP_DELAY_THREADS)");
  cmd->add_option("--max-flagged", config.max_flagged, "Flagged rows tolerated before exit code 2");
  cmd->add_flag("--dump-config", opts.dump_config, "Print the resolved config as JSON and exit");
}

void finish_config(ExperimentConfig& config, const CommonOptions& opts) {
  if (!opts.stack_file.empty()) config.stack.path = opts.stack_file;
  config.pol = parse_polarization(opts.pol);
  if (opts.format != "csv" && opts.format != "json") throw ValidationError("format: expected csv or json");
  config.format = opts.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  if (opts.first != "high" && opts.first != "low") throw ValidationError("first: expected high or low");
  config.stack.design.first_layer = opts.first == "high" ? FirstLayer::High : FirstLayer::Low;
  config.threads = opts.threads >= 0 ? static_cast<unsigned>(opts.threads) : threads_from_env();
}

int execute(const ExperimentConfig& config, const std::string& summary_path) {
  validate(config);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!config.output_path.empty()) {
    file.open(config.output_path);
    if (!file) throw ValidationError("cannot write '" + config.output_path + "'");
    out = &file;
  }

  std::ofstream summary_file;
  std::ostream* summary = &std::cerr;
  std::string summary_target = summary_path;
  if (summary_target.empty() && !config.output_path.empty()) summary_target = config.output_path + ".json";
  if (!summary_target.empty()) {
    summary_file.open(summary_target);
    if (!summary_file) throw ValidationError("cannot write '" + summary_target + "'");
    summary = &summary_file;
  }

  const auto outcome = run_experiment(config, *out, *summary);
  if (outcome.flagged > config.max_flagged) {
    std::cerr << "bandgap-delay: " << outcome.flagged << " flagged point(s) exceed --max-flagged "
              << config.max_flagged << '\n';
    return kExitNumerical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission delays of multilayer dielectric mirrors"};
  app.require_subcommand(1);

  ExperimentConfig config;
  CommonOptions opts;
  std::string figures_dir = "figures";
  std::string config_file;

  auto* spectrum = app.add_subcommand("spectrum", "Transmittance, reflectance and unwrapped phase vs wavelength");
  add_common(spectrum, config, opts);
  spectrum->add_option("--angle-deg", config.angle_deg, "Angle of incidence");
  spectrum->add_option("--from-nm", config.from_nm, "First wavelength");
  spectrum->add_option("--to-nm", config.to_nm, "Last wavelength");
  spectrum->add_option("--step-nm", config.step_nm, "Wavelength step");

  auto* scan = app.add_subcommand("scan-angle", "Delay theories vs angle of incidence");
  add_common(scan, config, opts);
  scan->add_option("--lambda-nm", config.lambda_nm, "Photon wavelength");
  scan->add_option("--from", config.from_deg, "First angle (deg)");
  scan->add_option("--to", config.to_deg, "Last angle (deg)");
  scan->add_option("--step", config.step_deg, "Angle step (deg)");

  auto* hom = app.add_subcommand("hom-dip", "Two-photon coincidence dip with the mirror in one arm");
  add_common(hom, config, opts);
  std::string shape = "gaussian";
  hom->add_option("--lambda-nm", config.lambda_nm, "Degenerate photon wavelength");
  hom->add_option("--angle-deg", config.angle_deg, "Angle of incidence");
  hom->add_option("--tc-fs", config.tc_fs, "Two-photon correlation time");
  hom->add_option("--shape", shape, "Spectrum shape: gaussian or sinc2");
  hom->add_option("--from-fs", config.from_fs, "First relative delay");
  hom->add_option("--to-fs", config.to_fs, "Last relative delay");
  hom->add_option("--step-fs", config.step_fs, "Delay step");
  hom->add_flag("--prism-microns", config.prism_microns, "Add the double-pass trombone position column");
  hom->add_option("--summary", opts.summary_path, "Summary JSON path (default <out>.json or stderr)");

  auto* perturb = app.add_subcommand("perturb", "Group-delay spread under random layer-thickness errors");
  add_common(perturb, config, opts);
  perturb->add_option("--lambda-nm", config.lambda_nm, "Photon wavelength");
  perturb->add_option("--angle-deg", config.angle_deg, "Angle of incidence");
  perturb->add_option("--sigma", config.sigma, "Relative thickness sigma");
  perturb->add_option("--samples", config.samples, "Ensemble size");
  perturb->add_option("--seed", config.seed, "Base seed");
  perturb->add_option("--summary", opts.summary_path, "Summary JSON path (default <out>.json or stderr)");

  auto* figures = app.add_subcommand("reproduce", "Write the fig2/fig3/fig4 theory files");
  FigureOptions figure_options;
  int figure_threads = -1;
  figures->add_option("--dir", figures_dir, "Output directory");
  figures->add_option("--design-nm", figure_options.mirror.design_wavelength_nm, "Mirror design wavelength");
  figures->add_option("--threads", figure_threads, "Worker threads");

  auto* run = app.add_subcommand("run", "Run an experiment config JSON (see --dump-config)");
  run->add_option("config", config_file, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (figures->parsed()) {
      figure_options.threads = figure_threads >= 0 ? static_cast<unsigned>(figure_threads) : threads_from_env();
      for (const auto& path : reproduce_figures(figures_dir, figure_options)) std::cout << path.string() << '\n';
      return 0;
    }
    if (run->parsed()) {
      std::ifstream in(config_file);
      if (!in) throw ValidationError("cannot open config '" + config_file + "'");
      nlohmann::json doc;
      try {
        in >> doc;
      } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
      }
      return execute(config_from_json(doc), "");
    }

    if (spectrum->parsed()) config.command = Command::Spectrum;
    if (scan->parsed()) config.command = Command::ScanAngle;
    if (hom->parsed()) config.command = Command::HomDip;
    if (perturb->parsed()) config.command = Command::Perturb;
    if (hom->parsed()) {
      if (shape != "gaussian" && shape != "sinc2") throw ValidationError("shape: expected gaussian or sinc2");
      config.shape = shape == "gaussian" ? SpectrumShape::Gaussian : SpectrumShape::Sinc2;
    }
    finish_config(config, opts);
    if (opts.dump_config) {
      validate(config);
      std::cout << config_to_json(config).dump(2) << '\n';
      return 0;
    }
    return execute(config, opts.summary_path);
  } catch (const ValidationError& e) {
    std::cerr << "bandgap-delay: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "bandgap-delay: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
