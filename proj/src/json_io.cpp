#include "shockcast/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace shockcast {

using nlohmann::json;

namespace {
template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
}  // namespace

json model_config_to_json(const ModelConfig& config) {
  json spline = {
      {"basis_count", config.basis_count}, {"degree", config.degree},
      {"level_low", config.level_low},     {"level_high", config.level_high},
      {"coef_low", config.bounds.coef_low}, {"coef_high", config.bounds.coef_high},
      {"asym_high", config.bounds.asym_high},
  };
  if (config.knot_anchor) spline["knot_anchor"] = *config.knot_anchor;
  return json{
      {"spline", spline},
      {"horseshoe",
       {{"tau0", config.horseshoe.tau0},
        {"nu", config.horseshoe.nu},
        {"slab_scale", config.horseshoe.slab_scale},
        {"shocks_enabled", config.horseshoe.shocks_enabled}}},
      {"hierarchy",
       {{"mean_sd", config.hierarchy.mean_sd},
        {"scale_sd", config.hierarchy.scale_sd},
        {"smoothing_shape", config.hierarchy.smoothing_shape},
        {"smoothing_rate", config.hierarchy.smoothing_rate}}},
  };
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig config;
  if (j.contains("spline")) {
    const auto& s = j.at("spline");
    maybe(s, "basis_count", config.basis_count);
    maybe(s, "degree", config.degree);
    maybe(s, "level_low", config.level_low);
    maybe(s, "level_high", config.level_high);
    maybe(s, "coef_low", config.bounds.coef_low);
    maybe(s, "coef_high", config.bounds.coef_high);
    maybe(s, "asym_high", config.bounds.asym_high);
    if (s.contains("knot_anchor")) config.knot_anchor = s.at("knot_anchor").get<double>();
  }
  if (j.contains("horseshoe")) {
    const auto& h = j.at("horseshoe");
    maybe(h, "tau0", config.horseshoe.tau0);
    maybe(h, "nu", config.horseshoe.nu);
    maybe(h, "slab_scale", config.horseshoe.slab_scale);
    maybe(h, "shocks_enabled", config.horseshoe.shocks_enabled);
  }
  if (j.contains("hierarchy")) {
    const auto& h = j.at("hierarchy");
    maybe(h, "mean_sd", config.hierarchy.mean_sd);
    maybe(h, "scale_sd", config.hierarchy.scale_sd);
    maybe(h, "smoothing_shape", config.hierarchy.smoothing_shape);
    maybe(h, "smoothing_rate", config.hierarchy.smoothing_rate);
  }
  return config;
}

json sampler_config_to_json(const SamplerConfig& config) {
  return json{
      {"chains", config.n_chains},
      {"warmup", config.n_warmup},
      {"sampling", config.n_sampling},
      {"target_accept", config.target_accept},
      {"max_tree_depth", config.max_tree_depth},
      {"divergence_threshold", config.divergence_threshold},
      {"seed", config.seed},
      {"init_radius", config.init_radius},
      {"rhat_threshold", config.rhat_threshold},
      {"nuts", config.nuts},
      {"leapfrog_steps", config.leapfrog_steps},
  };
}

SamplerConfig sampler_config_from_json(const json& j) {
  SamplerConfig config;
  maybe(j, "chains", config.n_chains);
  maybe(j, "warmup", config.n_warmup);
  maybe(j, "sampling", config.n_sampling);
  maybe(j, "target_accept", config.target_accept);
  maybe(j, "max_tree_depth", config.max_tree_depth);
  maybe(j, "divergence_threshold", config.divergence_threshold);
  maybe(j, "seed", config.seed);
  maybe(j, "init_radius", config.init_radius);
  maybe(j, "rhat_threshold", config.rhat_threshold);
  maybe(j, "nuts", config.nuts);
  maybe(j, "leapfrog_steps", config.leapfrog_steps);
  return config;
}

json synthetic_spec_to_json(const SyntheticSpec& spec) {
  json shocks = json::array();
  for (const auto& s : spec.shocks) {
    shocks.push_back({{"country", s.country}, {"period", s.period_index}, {"magnitude", s.magnitude}});
  }
  json beta = json::array();
  for (const auto& bs : spec.beta_star) {
    beta.push_back(std::vector<double>(bs.data(), bs.data() + bs.size()));
  }
  return json{
      {"n_countries", spec.n_countries},
      {"n_periods", spec.n_periods},
      {"seed", spec.seed},
      {"first_period_start", spec.first_period_start},
      {"tau_eps", spec.tau_eps},
      {"basis_count", spec.basis_count},
      {"degree", spec.degree},
      {"level_low", spec.level_low},
      {"level_high", spec.level_high},
      {"knot_anchor", spec.knot_anchor},
      {"coef_low", spec.bounds.coef_low},
      {"coef_high", spec.bounds.coef_high},
      {"asym_high", spec.bounds.asym_high},
      {"initial_levels", spec.initial_levels},
      {"beta_star", beta},
      {"regions", spec.regions},
      {"shocks", shocks},
      {"retry_cap", spec.retry_cap},
  };
}

SyntheticSpec synthetic_spec_from_json(const json& j) {
  SyntheticSpec spec;
  spec.n_countries = j.at("n_countries").get<int>();
  spec.n_periods = j.at("n_periods").get<int>();
  maybe(j, "seed", spec.seed);
  maybe(j, "first_period_start", spec.first_period_start);
  maybe(j, "tau_eps", spec.tau_eps);
  maybe(j, "basis_count", spec.basis_count);
  maybe(j, "degree", spec.degree);
  maybe(j, "level_low", spec.level_low);
  maybe(j, "level_high", spec.level_high);
  maybe(j, "knot_anchor", spec.knot_anchor);
  maybe(j, "coef_low", spec.bounds.coef_low);
  maybe(j, "coef_high", spec.bounds.coef_high);
  maybe(j, "asym_high", spec.bounds.asym_high);
  maybe(j, "retry_cap", spec.retry_cap);
  spec.initial_levels = j.at("initial_levels").get<std::vector<double>>();
  for (const auto& row : j.at("beta_star")) {
    auto v = row.get<std::vector<double>>();
    spec.beta_star.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  if (j.contains("regions")) spec.regions = j.at("regions").get<std::vector<std::string>>();
  if (j.contains("shocks")) {
    for (const auto& s : j.at("shocks")) {
      spec.shocks.push_back({s.at("country").get<int>(), s.at("period").get<int>(),
                             s.at("magnitude").get<double>()});
    }
  }
  return spec;
}

json layout_to_json(const ParameterLayout& layout, const SeriesPanel& panel) {
  json cells = json::array();
  for (const auto& cell : layout.cells()) {
    cells.push_back({{"country", panel.country(cell.country)},
                     {"period", panel.periods()[cell.t].label()}});
  }
  return json{
      {"dim", layout.dim()},
      {"n_countries", layout.n_countries()},
      {"n_coef", layout.n_coef()},
      {"shocks", layout.shocks()},
      {"cells", cells},
  };
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": JSON parse failure: " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace shockcast
