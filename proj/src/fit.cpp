#include "shockcast/fit.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "shockcast/diagnostics.hpp"
#include "shockcast/json_io.hpp"

namespace shockcast {

ConvergenceSummary summarize_convergence(const NamedDraws& draws, double divergence_rate,
                                         double rhat_threshold,
                                         std::vector<std::pair<std::string, double>>* rhat_out,
                                         std::vector<std::pair<std::string, double>>* ess_out) {
  ConvergenceSummary summary;
  summary.divergence_rate = divergence_rate;
  summary.rhat_threshold = rhat_threshold;
  summary.min_ess = std::numeric_limits<double>::infinity();

  for (int p = 0; p < draws.n_parameters(); ++p) {
    Eigen::MatrixXd mat = draws.parameter_matrix(p);
    auto rhat = split_rhat(mat);
    auto ess = effective_sample_size(mat);
    if (rhat_out) rhat_out->push_back({draws.names()[p], rhat.value_or(std::nan(""))});
    if (ess_out) ess_out->push_back({draws.names()[p], ess.value_or(std::nan(""))});
    if (!rhat || !ess) {
      ++summary.n_undefined;
      continue;
    }
    if (*rhat > summary.max_rhat) {
      summary.max_rhat = *rhat;
      summary.worst_rhat_parameter = draws.names()[p];
    }
    if (*ess < summary.min_ess) {
      summary.min_ess = *ess;
      summary.worst_ess_parameter = draws.names()[p];
    }
  }
  if (!std::isfinite(summary.min_ess)) summary.min_ess = 0.0;
  summary.converged = summary.max_rhat <= rhat_threshold && summary.max_rhat > 0.0;
  return summary;
}

FitResult run_fit(const SeriesPanel& panel, const ModelConfig& config,
                  const SamplerConfig& sampler_config) {
  ShockModel model(panel, config);
  PosteriorDraws raw = run_chains(model, sampler_config);
  NamedDraws draws = constrain_draws(model, raw);

  FitResult fit{panel, model.config(), sampler_config, std::move(draws), {}, {}, {}};
  fit.convergence = summarize_convergence(fit.draws, raw.divergence_rate(),
                                          sampler_config.rhat_threshold, &fit.rhat_by_parameter,
                                          &fit.ess_by_parameter);
  return fit;
}

void save_fit(const FitResult& fit, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_panel(fit.panel, (fs::path(dir) / "panel.csv").string());
  write_json_file((fs::path(dir) / "config.json").string(), model_config_to_json(fit.config));
  write_json_file((fs::path(dir) / "sampler.json").string(),
                  sampler_config_to_json(fit.sampler));
  ShockModel model(fit.panel, fit.config);
  write_json_file((fs::path(dir) / "layout.json").string(),
                  layout_to_json(model.layout(), fit.panel));
  write_draws_csv((fs::path(dir) / "draws.csv").string(), fit.draws);

  nlohmann::json diag;
  diag["convergence"] = {
      {"max_rhat", fit.convergence.max_rhat},
      {"worst_rhat_parameter", fit.convergence.worst_rhat_parameter},
      {"min_ess", fit.convergence.min_ess},
      {"worst_ess_parameter", fit.convergence.worst_ess_parameter},
      {"n_undefined", fit.convergence.n_undefined},
      {"divergence_rate", fit.convergence.divergence_rate},
      {"rhat_threshold", fit.convergence.rhat_threshold},
      {"converged", fit.convergence.converged},
  };
  nlohmann::json rhat = nlohmann::json::object();
  for (const auto& [name, value] : fit.rhat_by_parameter) {
    if (std::isfinite(value)) rhat[name] = value;
  }
  nlohmann::json ess = nlohmann::json::object();
  for (const auto& [name, value] : fit.ess_by_parameter) {
    if (std::isfinite(value)) ess[name] = value;
  }
  diag["split_rhat"] = rhat;
  diag["ess"] = ess;
  write_json_file((fs::path(dir) / "diagnostics.json").string(), diag);
}

FitResult load_fit(const std::string& dir) {
  namespace fs = std::filesystem;
  auto need = [&](const char* name) {
    fs::path p = fs::path(dir) / name;
    if (!fs::exists(p)) throw std::runtime_error("fit directory " + dir + " is missing " + name);
    return p.string();
  };
  SeriesPanel panel = load_panel(need("panel.csv"));
  ModelConfig config = model_config_from_json(read_json_file(need("config.json")));
  SamplerConfig sampler = sampler_config_from_json(read_json_file(need("sampler.json")));
  NamedDraws draws = read_draws_csv(need("draws.csv"));

  FitResult fit{std::move(panel), config, sampler, std::move(draws), {}, {}, {}};
  nlohmann::json diag = read_json_file(need("diagnostics.json"));
  const auto& c = diag.at("convergence");
  fit.convergence.max_rhat = c.at("max_rhat").get<double>();
  fit.convergence.worst_rhat_parameter = c.value("worst_rhat_parameter", std::string());
  fit.convergence.min_ess = c.at("min_ess").get<double>();
  fit.convergence.worst_ess_parameter = c.value("worst_ess_parameter", std::string());
  fit.convergence.n_undefined = c.value("n_undefined", 0);
  fit.convergence.divergence_rate = c.at("divergence_rate").get<double>();
  fit.convergence.rhat_threshold = c.value("rhat_threshold", 1.05);
  fit.convergence.converged = c.at("converged").get<bool>();
  return fit;
}

}  // namespace shockcast
