#include "shockcast/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "shockcast/draws.hpp"
#include "shockcast/fit.hpp"

namespace shockcast {

RegionMetrics compute_metrics(const std::string& label, const std::vector<ValidationCell>& cells) {
  RegionMetrics m;
  m.region = label;
  m.n = static_cast<int>(cells.size());
  if (cells.empty()) return m;
  std::vector<double> errors, abs_errors, widths;
  int below = 0, included = 0, above = 0;
  for (const auto& cell : cells) {
    errors.push_back(cell.error);
    abs_errors.push_back(std::abs(cell.error));
    widths.push_back(cell.width);
    below += cell.below;
    included += cell.included;
    above += cell.above;
  }
  m.me = quantile(errors, 0.5);
  m.mae = quantile(abs_errors, 0.5);
  m.pct_below = 100.0 * below / m.n;
  m.pct_included = 100.0 * included / m.n;
  m.pct_above = 100.0 * above / m.n;
  m.pi_width_median = quantile(widths, 0.5);
  double sum = 0.0;
  for (double w : widths) sum += w;
  m.pi_width_mean = sum / m.n;
  return m;
}

ValidationReport validate(const SeriesPanel& panel, const std::vector<ValidationModelSpec>& models,
                          const ValidationOptions& options) {
  if (models.empty()) throw std::invalid_argument("validate: no model configurations given");
  int cutoff_idx = panel.period_index(options.cutoff);
  int target_idx = panel.period_index(options.target);
  if (cutoff_idx < 0) throw std::runtime_error("validate: cutoff period not in panel");
  if (target_idx < 0) throw std::runtime_error("validate: target period not in panel");
  if (target_idx <= cutoff_idx) {
    throw std::runtime_error("validate: target period must come after the cutoff");
  }
  const int horizon = target_idx - cutoff_idx;

  auto [train, test] = holdout_split(panel, options.cutoff);

  ValidationReport report;
  report.cutoff = options.cutoff;
  report.target = options.target;

  for (const auto& spec : models) {
    FitResult fit = run_fit(train, spec.config, options.sampler);

    ProjectionConfig pcfg;
    pcfg.horizon = horizon;
    pcfg.mode = spec.config.horseshoe.shocks_enabled ? ProjectionMode::with_shock
                                                     : ProjectionMode::shock_free;
    pcfg.quantiles = {options.interval_low, 0.5, options.interval_high};
    pcfg.seed = options.projection_seed;
    pcfg.allow_unconverged = true;  // convergence is reported per model instead
    ProjectionFan fan = project(fit, pcfg);

    ModelValidation mv;
    mv.label = spec.label;
    mv.converged = fit.convergence.converged;
    mv.max_rhat = fit.convergence.max_rhat;
    mv.fan = fan;

    int target_h = horizon - 1;
    for (int c = 0; c < panel.n_countries(); ++c) {
      if (!panel.observed(c, target_idx)) {
        mv.excluded.push_back(panel.country(c));
        continue;
      }
      ValidationCell cell;
      cell.country = panel.country(c);
      cell.region = panel.region(c);
      cell.observed = panel.value(c, target_idx);
      int fc = fan.country_index(cell.country);
      const auto& q = fan.quantiles[static_cast<std::size_t>(fc)];
      cell.q_low = q(target_h, 0);
      cell.predicted = q(target_h, 1);
      cell.q_high = q(target_h, 2);
      cell.error = cell.observed - cell.predicted;
      // Closed interval: an observation on an endpoint counts as included.
      cell.below = cell.observed < cell.q_low;
      cell.above = cell.observed > cell.q_high;
      cell.included = !cell.below && !cell.above;
      cell.width = cell.q_high - cell.q_low;
      mv.cells.push_back(std::move(cell));
    }

    std::map<std::string, std::vector<ValidationCell>> by_region;
    for (const auto& cell : mv.cells) by_region[cell.region].push_back(cell);
    for (const auto& [region, cells] : by_region) {
      mv.regions.push_back(compute_metrics(region, cells));
    }
    mv.overall = compute_metrics("Overall", mv.cells);
    report.models.push_back(std::move(mv));
  }
  return report;
}

namespace {
std::string fmt(double v, const char* spec = "%.9g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}
}  // namespace

CsvTable metric_table_csv(const ValidationReport& report) {
  CsvTable table;
  table.header = {"model", "region", "n", "me", "mae", "pct_below", "pct_included", "pct_above",
                  "pi_width", "pi_width_mean"};
  auto add = [&](const std::string& model, const RegionMetrics& m) {
    table.rows.push_back({model, m.region, std::to_string(m.n), fmt(m.me), fmt(m.mae),
                          fmt(m.pct_below), fmt(m.pct_included), fmt(m.pct_above),
                          fmt(m.pi_width_median), fmt(m.pi_width_mean)});
  };
  for (const auto& mv : report.models) {
    for (const auto& region : mv.regions) add(mv.label, region);
    add(mv.label, mv.overall);
  }
  return table;
}

std::string metric_table_text(const ValidationReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %-16s %5s %8s %8s %9s %12s %9s %9s\n", "Model",
                "Region", "n", "ME", "MAE", "% Below", "% Included", "% Above", "PI Width");
  out += line;
  auto add = [&](const std::string& model, const RegionMetrics& m) {
    std::snprintf(line, sizeof(line), "%-12s %-16s %5d %8.2f %8.2f %8.1f%% %11.1f%% %8.1f%% %9.2f\n",
                  model.c_str(), m.region.c_str(), m.n, m.me, m.mae, m.pct_below, m.pct_included,
                  m.pct_above, m.pi_width_median);
    out += line;
  };
  for (const auto& mv : report.models) {
    for (const auto& region : mv.regions) add(mv.label, region);
    add(mv.label, mv.overall);
    if (!mv.converged) {
      std::snprintf(line, sizeof(line), "  [warning] %s: fit not converged (max split-Rhat %.3f)\n",
                    mv.label.c_str(), mv.max_rhat);
      out += line;
    }
    if (!mv.excluded.empty()) {
      out += "  [excluded, no target observation]";
      for (const auto& c : mv.excluded) out += " " + c;
      out += "\n";
    }
  }
  return out;
}

}  // namespace shockcast
