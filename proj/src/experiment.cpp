#include "bandgap/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "bandgap/parallel.hpp"
#include "bandgap/stack_io.hpp"

namespace bandgap {

using nlohmann::json;

namespace {

constexpr int kCsvDigits = 12;

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

bool finite_all(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

// Writes a double with 12 significant digits, or nothing for NaN.
struct Field {
  double value;
};

std::ostream& operator<<(std::ostream& out, Field f) {
  if (std::isnan(f.value)) return out;
  return out << std::setprecision(kCsvDigits) << (f.value == 0.0 ? 0.0 : f.value);  // no "-0"
}

json nullable(double value) { return std::isnan(value) ? json(nullptr) : json(value); }

const char* to_string(SpectrumShape shape) { return shape == SpectrumShape::Gaussian ? "gaussian" : "sinc2"; }

SpectrumShape parse_shape(const std::string& text) {
  if (text == "gaussian") return SpectrumShape::Gaussian;
  if (text == "sinc2") return SpectrumShape::Sinc2;
  throw ValidationError("shape: expected \"gaussian\" or \"sinc2\"");
}

}  // namespace

const char* to_string(Command command) {
  switch (command) {
    case Command::Spectrum: return "spectrum";
    case Command::ScanAngle: return "scan-angle";
    case Command::HomDip: return "hom-dip";
    case Command::Perturb: return "perturb";
  }
  return "?";
}

Command parse_command(const std::string& text) {
  for (Command c : {Command::Spectrum, Command::ScanAngle, Command::HomDip, Command::Perturb}) {
    if (text == to_string(c)) return c;
  }
  throw ValidationError("command: unknown '" + text + "'");
}

LayerStack StackSource::resolve() const {
  if (path) return load_stack_file(*path);
  return build_quarter_wave_stack(design);
}

std::vector<double> linear_range(double from, double to, double step) {
  require(finite_all({from, to, step}) && step > 0.0 && to >= from, "range: need from <= to and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::min(from + static_cast<double>(i) * step, to);
  return out;
}

void validate(const ExperimentConfig& c) {
  if (!c.stack.path) {
    const auto& d = c.stack.design;
    require(finite_all({d.design_wavelength_nm, d.n_high, d.n_low}) && d.design_wavelength_nm > 0.0,
            "design_nm: must be > 0");
    require(d.n_high > 0.0 && d.n_low > 0.0, "n_high/n_low: must be > 0");
    require(d.layer_count >= 1, "layers: must be >= 1");
  }
  require(std::isfinite(c.lambda_nm) && c.lambda_nm > 0.0, "lambda_nm: must be > 0");
  require(std::isfinite(c.angle_deg) && c.angle_deg >= 0.0 && c.angle_deg < 90.0,
          "angle_deg: must lie in [0, 90)");
  require(c.threads <= 1024, "threads: must be <= 1024");
  require(c.max_flagged >= 0, "max_flagged: must be >= 0");

  switch (c.command) {
    case Command::Spectrum:
      require(finite_all({c.from_nm, c.to_nm, c.step_nm}) && c.from_nm > 0.0 && c.to_nm >= c.from_nm &&
                  c.step_nm > 0.0,
              "spectrum range: need 0 < from_nm <= to_nm and step_nm > 0");
      break;
    case Command::ScanAngle:
      require(finite_all({c.from_deg, c.to_deg, c.step_deg}) && c.from_deg >= 0.0 && c.to_deg <= 85.0 &&
                  c.to_deg >= c.from_deg && c.step_deg > 0.0,
              "angle range: need 0 <= from_deg <= to_deg <= 85 and step_deg > 0");
      break;
    case Command::HomDip:
      require(std::isfinite(c.tc_fs) && c.tc_fs > 0.0, "tc_fs: must be > 0");
      require(finite_all({c.from_fs, c.to_fs, c.step_fs}) && c.to_fs >= c.from_fs && c.step_fs > 0.0,
              "delay range: need from_fs <= to_fs and step_fs > 0");
      require((c.to_fs - c.from_fs) / c.step_fs >= 4.0, "delay range: need at least 5 samples");
      break;
    case Command::Perturb:
      require(std::isfinite(c.sigma) && c.sigma >= 0.0 && c.sigma <= 0.1, "sigma: must lie in [0, 0.1]");
      require(c.samples >= 2, "samples: must be >= 2");
      break;
  }
}

json config_to_json(const ExperimentConfig& c) {
  json stack;
  if (c.stack.path) stack["path"] = *c.stack.path;
  stack["quarter_wave"] = quarter_wave_to_json(c.stack.design);
  return json{{"command", to_string(c.command)},
              {"stack", stack},
              {"lambda_nm", c.lambda_nm},
              {"angle_deg", c.angle_deg},
              {"pol", to_string(c.pol)},
              {"spectrum", {{"from_nm", c.from_nm}, {"to_nm", c.to_nm}, {"step_nm", c.step_nm}}},
              {"scan", {{"from_deg", c.from_deg}, {"to_deg", c.to_deg}, {"step_deg", c.step_deg}}},
              {"hom",
               {{"tc_fs", c.tc_fs},
                {"shape", to_string(c.shape)},
                {"from_fs", c.from_fs},
                {"to_fs", c.to_fs},
                {"step_fs", c.step_fs},
                {"prism_microns", c.prism_microns}}},
              {"perturb", {{"sigma", c.sigma}, {"samples", c.samples}, {"seed", c.seed}}},
              {"output_path", c.output_path},
              {"format", c.format == OutputFormat::Csv ? "csv" : "json"},
              {"threads", c.threads},
              {"max_flagged", c.max_flagged}};
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("config: expected a JSON object");
  ExperimentConfig c;
  try {
    c.command = parse_command(doc.at("command").get<std::string>());
    if (doc.contains("stack")) {
      const auto& s = doc.at("stack");
      if (s.contains("path")) c.stack.path = s.at("path").get<std::string>();
      if (s.contains("quarter_wave")) c.stack.design = quarter_wave_from_json(s.at("quarter_wave"));
    }
    c.lambda_nm = doc.value("lambda_nm", c.lambda_nm);
    c.angle_deg = doc.value("angle_deg", c.angle_deg);
    c.pol = parse_polarization(doc.value("pol", std::string("p")));
    if (doc.contains("spectrum")) {
      const auto& s = doc.at("spectrum");
      c.from_nm = s.value("from_nm", c.from_nm);
      c.to_nm = s.value("to_nm", c.to_nm);
      c.step_nm = s.value("step_nm", c.step_nm);
    }
    if (doc.contains("scan")) {
      const auto& s = doc.at("scan");
      c.from_deg = s.value("from_deg", c.from_deg);
      c.to_deg = s.value("to_deg", c.to_deg);
      c.step_deg = s.value("step_deg", c.step_deg);
    }
    if (doc.contains("hom")) {
      const auto& h = doc.at("hom");
      c.tc_fs = h.value("tc_fs", c.tc_fs);
      c.shape = parse_shape(h.value("shape", std::string("gaussian")));
      c.from_fs = h.value("from_fs", c.from_fs);
      c.to_fs = h.value("to_fs", c.to_fs);
      c.step_fs = h.value("step_fs", c.step_fs);
      c.prism_microns = h.value("prism_microns", c.prism_microns);
    }
    if (doc.contains("perturb")) {
      const auto& p = doc.at("perturb");
      c.sigma = p.value("sigma", c.sigma);
      c.samples = p.value("samples", c.samples);
      c.seed = p.value("seed", c.seed);
    }
    c.output_path = doc.value("output_path", std::string());
    const std::string format = doc.value("format", std::string("csv"));
    require(format == "csv" || format == "json", "format: expected \"csv\" or \"json\"");
    c.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    c.threads = doc.value("threads", c.threads);
    c.max_flagged = doc.value("max_flagged", c.max_flagged);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumSample>& samples) {
  out << "wavelength_nm,transmittance,reflectance,phi_T_rad\n";
  for (const auto& s : samples) {
    out << Field{s.wavelength_nm} << ',' << Field{s.transmittance} << ',' << Field{s.reflectance} << ','
        << Field{s.phi_t} << '\n';
  }
}

void write_scan_csv(std::ostream& out, const std::vector<DelayReport>& rows) {
  out << "angle_deg,transmittance,rel_group_delay_fs,rel_larmor_fs,semiclassical_fs,transverse_shift_nm,flags\n";
  for (const auto& r : rows) {
    out << Field{rad_to_deg(r.angle_rad)} << ',' << Field{r.transmittance} << ','
        << Field{r.relative_group_delay_fs} << ',' << Field{r.relative_larmor_time_fs} << ','
        << Field{r.semiclassical_time_fs.value_or(std::numeric_limits<double>::quiet_NaN())} << ','
        << Field{r.transverse_shift_nm} << ',' << describe_flags(r.flags) << '\n';
  }
}

json scan_to_json(const std::vector<DelayReport>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"angle_deg", rad_to_deg(r.angle_rad)},
                   {"transmittance", r.transmittance},
                   {"group_delay_fs", nullable(r.group_delay_fs)},
                   {"phase_derivative_fs", nullable(r.phase_derivative_fs)},
                   {"transverse_shift_nm", nullable(r.transverse_shift_nm)},
                   {"larmor_out_of_plane_fs", nullable(r.larmor_out_of_plane_fs)},
                   {"larmor_time_fs", nullable(r.larmor_time_fs)},
                   {"larmor_in_plane_raw_fs", nullable(r.larmor_in_plane_raw_fs)},
                   {"semiclassical_fs", r.semiclassical_time_fs ? json(*r.semiclassical_time_fs) : json(nullptr)},
                   {"air_time_fs", nullable(r.air_time_fs)},
                   {"rel_group_delay_fs", nullable(r.relative_group_delay_fs)},
                   {"rel_larmor_fs", nullable(r.relative_larmor_time_fs)},
                   {"flags", describe_flags(r.flags)}});
  }
  return out;
}

void write_dip_csv(std::ostream& out, const DipTrace& trace, bool prism_microns) {
  out << "tau_fs,rate" << (prism_microns ? ",prism_um" : "") << '\n';
  for (std::size_t i = 0; i < trace.delays_fs.size(); ++i) {
    out << Field{trace.delays_fs[i]} << ',' << Field{trace.rates[i]};
    if (prism_microns) out << ',' << Field{prism_position_um(trace.delays_fs[i])};
    out << '\n';
  }
}

json dip_summary(const DipTrace& trace) {
  return json{{"dip_center_fs", trace.dip_center_fs}, {"visibility", trace.visibility}};
}

json ensemble_to_json(const EnsembleSummary& s) {
  return json{{"samples", s.samples},
              {"excluded_opaque", s.excluded_opaque},
              {"nominal_relative_delay_fs", s.nominal_relative_delay_fs},
              {"mean_deviation_fs", s.mean_deviation_fs},
              {"stddev_deviation_fs", s.stddev_deviation_fs},
              {"min_deviation_fs", s.min_deviation_fs},
              {"max_deviation_fs", s.max_deviation_fs}};
}

std::uint64_t sample_seed(std::uint64_t base_seed, std::uint64_t index) {
  // splitmix64 finalizer over base + golden-ratio counter
  std::uint64_t z = base_seed + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

EnsembleSummary run_perturbation_ensemble(const LayerStack& stack, double sigma, int n_samples,
                                          const OperatingPoint& point, std::uint64_t base_seed,
                                          unsigned threads) {
  require(n_samples >= 2, "n_samples: must be >= 2");
  require(std::isfinite(sigma) && sigma >= 0.0 && sigma <= 0.1, "sigma: must lie in [0, 0.1]");
  validate(point);

  EnsembleSummary summary;
  summary.samples = n_samples;
  summary.nominal_relative_delay_fs = delay_report(stack, point).relative_group_delay_fs;

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  summary.deviations_fs.assign(static_cast<std::size_t>(n_samples), nan);
  parallel_for(summary.deviations_fs.size(), threads, [&](std::size_t i) {
    const LayerStack sample = perturb_thicknesses(stack, sigma, sample_seed(base_seed, i));
    if (!(transmittance(sample, point) > kOpaqueThreshold)) return;
    summary.deviations_fs[i] =
        delay_report(sample, point).relative_group_delay_fs - summary.nominal_relative_delay_fs;
  });

  double sum = 0.0;
  int used = 0;
  summary.min_deviation_fs = std::numeric_limits<double>::infinity();
  summary.max_deviation_fs = -std::numeric_limits<double>::infinity();
  for (double d : summary.deviations_fs) {
    if (std::isnan(d)) {
      ++summary.excluded_opaque;
      continue;
    }
    sum += d;
    ++used;
    summary.min_deviation_fs = std::min(summary.min_deviation_fs, d);
    summary.max_deviation_fs = std::max(summary.max_deviation_fs, d);
  }
  if (used == 0) throw NumericalError("perturbation ensemble: every sample is opaque");
  summary.mean_deviation_fs = sum / used;
  double sq = 0.0;
  for (double d : summary.deviations_fs) {
    if (!std::isnan(d)) sq += (d - summary.mean_deviation_fs) * (d - summary.mean_deviation_fs);
  }
  summary.stddev_deviation_fs = used > 1 ? std::sqrt(sq / (used - 1)) : 0.0;
  return summary;
}

std::vector<std::filesystem::path> reproduce_figures(const std::filesystem::path& directory,
                                                     const FigureOptions& options) {
  std::filesystem::create_directories(directory);
  const LayerStack mirror = build_quarter_wave_stack(options.mirror);
  const auto spectrum = PhotonPairSpectrum::degenerate_at(options.photon_wavelength_nm,
                                                          options.correlation_time_fs);
  std::vector<std::filesystem::path> written;

  auto open = [&](const std::string& name) {
    const auto path = directory / name;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    written.push_back(path);
    return out;
  };

  const auto delays = delay_grid(-40.0, 40.0, 0.25);
  json summary;
  for (const auto& [name, angle_deg] :
       {std::pair<std::string, double>{"fig2a", 0.0}, {"fig2b", options.oblique_angle_deg}}) {
    const auto barrier = BarrierResponse::relative_to_air(mirror, deg_to_rad(angle_deg), Polarization::P);
    const auto trace = trace_dip(spectrum, barrier, delays, options.threads);
    auto out = open(name + ".csv");
    write_dip_csv(out, trace);
    summary[name] = dip_summary(trace);
    summary[name]["angle_deg"] = angle_deg;
  }
  {
    auto out = open("fig2_summary.json");
    out << summary.dump(2) << '\n';
  }

  std::vector<double> angles;
  for (double deg : linear_range(0.0, 70.0, 1.0)) angles.push_back(deg_to_rad(deg));
  for (const auto& [name, pol] : {std::pair<std::string, Polarization>{"fig3_theory", Polarization::P},
                                  {"fig4_theory", Polarization::S}}) {
    const auto rows = angle_scan(mirror, options.photon_wavelength_nm, pol, angles, options.threads);
    auto out = open(name + ".csv");
    write_scan_csv(out, rows);
  }
  return written;
}

RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& summary_out) {
  validate(config);
  const LayerStack stack = config.stack.resolve();
  const double angle = deg_to_rad(config.angle_deg);
  RunOutcome outcome;

  switch (config.command) {
    case Command::Spectrum: {
      const auto wavelengths = linear_range(config.from_nm, config.to_nm, config.step_nm);
      const auto samples = transmission_spectrum(stack, wavelengths, angle, config.pol);
      if (config.format == OutputFormat::Csv) {
        write_spectrum_csv(out, samples);
      } else {
        json rows = json::array();
        for (const auto& s : samples) {
          rows.push_back({{"wavelength_nm", s.wavelength_nm},
                          {"transmittance", s.transmittance},
                          {"reflectance", s.reflectance},
                          {"phi_T_rad", s.phi_t}});
        }
        out << rows.dump(2) << '\n';
      }
      break;
    }
    case Command::ScanAngle: {
      std::vector<double> angles;
      for (double deg : linear_range(config.from_deg, config.to_deg, config.step_deg)) {
        angles.push_back(deg_to_rad(deg));
      }
      const auto rows = angle_scan(stack, config.lambda_nm, config.pol, angles, config.threads);
      outcome.flagged = static_cast<int>(std::count_if(rows.begin(), rows.end(),
                                                       [](const DelayReport& r) { return r.failed(); }));
      if (config.format == OutputFormat::Csv) {
        write_scan_csv(out, rows);
      } else {
        out << scan_to_json(rows).dump(2) << '\n';
      }
      break;
    }
    case Command::HomDip: {
      const auto spectrum = PhotonPairSpectrum::degenerate_at(config.lambda_nm, config.tc_fs, config.shape);
      const auto barrier = BarrierResponse::relative_to_air(stack, angle, config.pol);
      const auto trace = trace_dip(spectrum, barrier, delay_grid(config.from_fs, config.to_fs, config.step_fs),
                                   config.threads);
      if (config.format == OutputFormat::Csv) {
        write_dip_csv(out, trace, config.prism_microns);
        summary_out << dip_summary(trace).dump(2) << '\n';
      } else {
        json doc = dip_summary(trace);
        doc["tau_fs"] = trace.delays_fs;
        doc["rate"] = trace.rates;
        if (config.prism_microns) doc["prism_um"] = trace.prism_positions_um();
        out << doc.dump(2) << '\n';
      }
      break;
    }
    case Command::Perturb: {
      const OperatingPoint point{config.lambda_nm, angle, config.pol};
      const auto summary =
          run_perturbation_ensemble(stack, config.sigma, config.samples, point, config.seed, config.threads);
      if (config.format == OutputFormat::Json) {
        out << ensemble_to_json(summary).dump(2) << '\n';
      } else {
        out << "sample,seed,deviation_fs\n";
        for (std::size_t i = 0; i < summary.deviations_fs.size(); ++i) {
          out << i << ',' << sample_seed(config.seed, i) << ',' << Field{summary.deviations_fs[i]} << '\n';
        }
        summary_out << ensemble_to_json(summary).dump(2) << '\n';
      }
      break;
    }
  }
  return outcome;
}

}  // namespace bandgap
