#pragma once

#include <string>

#include <json.hpp>

#include "shockcast/model.hpp"
#include "shockcast/sampler.hpp"
#include "shockcast/synthetic.hpp"

namespace shockcast {

nlohmann::json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json sampler_config_to_json(const SamplerConfig& config);
SamplerConfig sampler_config_from_json(const nlohmann::json& j);

nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

nlohmann::json layout_to_json(const ParameterLayout& layout, const SeriesPanel& panel);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace shockcast
