#pragma once

#include <filesystem>

#include <json.hpp>

#include "bandgap/stack.hpp"

namespace bandgap {

// Stack description files come in two forms:
//
//   explicit:  { "incident_medium": 1.0, "exit_medium": 1.0,
//                "layers": [ {"n": 2.22, "d_nm": 77.93}, ... ] }
//   shorthand: { "quarter_wave": { "lambda0_nm": 692, "n_high": 2.22, "n_low": 1.41,
//                                  "count": 11, "first": "high" } }
//
// A complex index is written either as a number or as {"n": re, "k": im} inline
// in the layer object. Optional keys: "label", "air_gap_nm".

LayerStack stack_from_json(const nlohmann::json& doc);
nlohmann::json stack_to_json(const LayerStack& stack);

QuarterWaveDesign quarter_wave_from_json(const nlohmann::json& doc);
nlohmann::json quarter_wave_to_json(const QuarterWaveDesign& design);

LayerStack load_stack_file(const std::filesystem::path& path);
void save_stack_file(const LayerStack& stack, const std::filesystem::path& path);

}  // namespace bandgap
