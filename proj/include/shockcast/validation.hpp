#pragma once

#include <string>
#include <vector>

#include "shockcast/csv.hpp"
#include "shockcast/model.hpp"
#include "shockcast/panel.hpp"
#include "shockcast/projection.hpp"
#include "shockcast/sampler.hpp"

namespace shockcast {

struct ValidationModelSpec {
  std::string label;
  ModelConfig config;
};

struct ValidationOptions {
  Period cutoff;
  Period target;
  SamplerConfig sampler;
  std::uint64_t projection_seed = 1;
  double interval_low = 0.1;  // 80% projection interval
  double interval_high = 0.9;
  bool parallel_models = false;  // sequential by default (memory-bounded)
};

struct ValidationCell {
  std::string country;
  std::string region;
  double observed = 0.0;
  double q_low = 0.0;
  double predicted = 0.0;  // posterior median
  double q_high = 0.0;
  double error = 0.0;  // observed - predicted
  bool below = false, included = false, above = false;
  double width = 0.0;
};

struct RegionMetrics {
  std::string region;
  int n = 0;
  double me = 0.0;
  double mae = 0.0;
  double pct_below = 0.0;
  double pct_included = 0.0;
  double pct_above = 0.0;
  double pi_width_median = 0.0;
  double pi_width_mean = 0.0;
};

struct ModelValidation {
  std::string label;
  bool converged = false;
  double max_rhat = 0.0;
  std::vector<ValidationCell> cells;  // target-period cells only
  std::vector<std::string> excluded;  // countries without a target observation
  std::vector<RegionMetrics> regions;
  RegionMetrics overall;  // recomputed from all cells, not from region rows
  ProjectionFan fan;      // raw output, intermediate periods included
};

struct ValidationReport {
  Period cutoff;
  Period target;
  std::vector<ModelValidation> models;
};

// Fits each model on the train split, projects to the target period, and
// scores errors/coverage against the held-out observations.
ValidationReport validate(const SeriesPanel& panel, const std::vector<ValidationModelSpec>& models,
                          const ValidationOptions& options);

RegionMetrics compute_metrics(const std::string& label, const std::vector<ValidationCell>& cells);

CsvTable metric_table_csv(const ValidationReport& report);
std::string metric_table_text(const ValidationReport& report);

}  // namespace shockcast
