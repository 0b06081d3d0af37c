#include "bandgap/stack_io.hpp"

#include <fstream>

namespace bandgap {

using nlohmann::json;

namespace {

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ValidationError(where + "." + key + ": missing");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
  return v.get<double>();
}

Complex medium_from_json(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_object() && v.contains("n")) {
    const double k = v.contains("k") ? require_number(v, "k", where) : 0.0;
    return {require_number(v, "n", where), k};
  }
  throw ValidationError(where + ": expected a number or {\"n\": .., \"k\": ..}");
}

json medium_to_json(Complex n) {
  if (n.imag() == 0.0) return n.real();
  return json{{"n", n.real()}, {"k", n.imag()}};
}

}  // namespace

QuarterWaveDesign quarter_wave_from_json(const json& qw) {
  if (!qw.is_object()) throw ValidationError("quarter_wave: expected an object");
  QuarterWaveDesign design;
  design.design_wavelength_nm = require_number(qw, "lambda0_nm", "quarter_wave");
  design.n_high = require_number(qw, "n_high", "quarter_wave");
  design.n_low = require_number(qw, "n_low", "quarter_wave");
  if (!qw.contains("count") || !qw.at("count").is_number_integer()) {
    throw ValidationError("quarter_wave.count: expected an integer");
  }
  design.layer_count = qw.at("count").get<int>();
  const std::string first = qw.value("first", std::string("high"));
  if (first == "high") {
    design.first_layer = FirstLayer::High;
  } else if (first == "low") {
    design.first_layer = FirstLayer::Low;
  } else {
    throw ValidationError("quarter_wave.first: expected \"high\" or \"low\"");
  }
  return design;
}

json quarter_wave_to_json(const QuarterWaveDesign& design) {
  return json{{"lambda0_nm", design.design_wavelength_nm},
              {"n_high", design.n_high},
              {"n_low", design.n_low},
              {"count", design.layer_count},
              {"first", design.first_layer == FirstLayer::High ? "high" : "low"}};
}

LayerStack stack_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("stack: expected a JSON object");

  LayerStack stack;
  if (doc.contains("quarter_wave")) {
    stack = build_quarter_wave_stack(quarter_wave_from_json(doc.at("quarter_wave")));
  } else {
    if (!doc.contains("layers") || !doc.at("layers").is_array()) {
      throw ValidationError("stack.layers: missing or not an array");
    }
    std::vector<Layer> layers;
    std::size_t j = 0;
    for (const auto& item : doc.at("layers")) {
      const std::string where = "layers[" + std::to_string(j++) + "]";
      if (!item.is_object()) throw ValidationError(where + ": expected an object");
      const double k = item.contains("k") ? require_number(item, "k", where) : 0.0;
      layers.push_back({Complex(require_number(item, "n", where), k),
                        require_number(item, "d_nm", where)});
    }
    const Complex incident =
        doc.contains("incident_medium") ? medium_from_json(doc.at("incident_medium"), "incident_medium")
                                        : Complex(1.0);
    const Complex exit =
        doc.contains("exit_medium") ? medium_from_json(doc.at("exit_medium"), "exit_medium") : Complex(1.0);
    stack = LayerStack(std::move(layers), incident, exit);
  }

  if (doc.contains("label")) stack = stack.with_label(doc.at("label").get<std::string>());
  if (doc.contains("air_gap_nm")) stack = stack.with_air_gap(require_number(doc, "air_gap_nm", "stack"));
  return stack;
}

json stack_to_json(const LayerStack& stack) {
  json layers = json::array();
  for (const auto& layer : stack.layers()) {
    json item{{"n", layer.refractive_index.real()}, {"d_nm", layer.thickness_nm}};
    if (layer.refractive_index.imag() != 0.0) item["k"] = layer.refractive_index.imag();
    layers.push_back(std::move(item));
  }
  json doc{{"incident_medium", medium_to_json(stack.incident_medium())},
           {"exit_medium", medium_to_json(stack.exit_medium())},
           {"layers", std::move(layers)}};
  if (!stack.label().empty()) doc["label"] = stack.label();
  if (stack.air_gap_nm() != 0.0) doc["air_gap_nm"] = stack.air_gap_nm();
  return doc;
}

LayerStack load_stack_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("stack file: cannot open '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError("stack file '" + path.string() + "': " + e.what());
  }
  return stack_from_json(doc);
}

void save_stack_file(const LayerStack& stack, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("stack file: cannot write '" + path.string() + "'");
  out << stack_to_json(stack).dump(2) << '\n';
}

}  // namespace bandgap
