#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shockcast/draws.hpp"
#include "shockcast/model.hpp"
#include "shockcast/panel.hpp"
#include "shockcast/sampler.hpp"

namespace shockcast {

struct ConvergenceSummary {
  double max_rhat = 0.0;
  std::string worst_rhat_parameter;
  double min_ess = 0.0;
  std::string worst_ess_parameter;
  int n_undefined = 0;  // parameters whose diagnostics are not applicable
  double divergence_rate = 0.0;
  double rhat_threshold = 1.05;
  bool converged = false;
};

// A fitted model: training panel, resolved configuration, constrained draws,
// and convergence diagnostics. Sufficient for projection and detection.
struct FitResult {
  SeriesPanel panel;
  ModelConfig config;   // knot anchor resolved
  SamplerConfig sampler;
  NamedDraws draws;
  ConvergenceSummary convergence;
  std::vector<std::pair<std::string, double>> rhat_by_parameter;
  std::vector<std::pair<std::string, double>> ess_by_parameter;

  ShockModel make_model() const { return ShockModel(panel, config); }
};

FitResult run_fit(const SeriesPanel& panel, const ModelConfig& config,
                  const SamplerConfig& sampler_config);

ConvergenceSummary summarize_convergence(const NamedDraws& draws, double divergence_rate,
                                         double rhat_threshold,
                                         std::vector<std::pair<std::string, double>>* rhat_out,
                                         std::vector<std::pair<std::string, double>>* ess_out);

// Fit directory layout: panel.csv, config.json, sampler.json, layout.json,
// draws.csv, diagnostics.json.
void save_fit(const FitResult& fit, const std::string& dir);
FitResult load_fit(const std::string& dir);

}  // namespace shockcast
