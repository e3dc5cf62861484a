#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "shockcast/csv.hpp"
#include "shockcast/fit.hpp"
#include "shockcast/panel.hpp"

namespace shockcast {

enum class ProjectionMode { with_shock, shock_free };

std::string to_string(ProjectionMode mode);
ProjectionMode projection_mode_from_string(const std::string& s);

// Experimental: fixes the local shock scale of one country-period to a
// user-supplied value instead of drawing it from the prior.
struct CrisisSpec {
  std::string country;
  Period period;
  double gamma = 1.0;
};

struct ProjectionConfig {
  int horizon = 16;
  ProjectionMode mode = ProjectionMode::with_shock;
  std::vector<double> quantiles = {0.1, 0.5, 0.9};
  std::uint64_t seed = 1;
  bool allow_unconverged = false;
  std::optional<CrisisSpec> crisis;
};

struct ProjectionFan {
  std::vector<std::string> countries;
  std::vector<std::string> regions;
  std::vector<Period> periods;  // horizon, contiguous with the last panel period
  std::vector<double> quantile_levels;
  // per country: horizon x n_quantiles, nondecreasing across each row
  std::vector<Eigen::MatrixXd> quantiles;
  ProjectionMode mode = ProjectionMode::with_shock;
  int draw_count = 0;

  int country_index(const std::string& code) const;
  double width(int country, int period) const;  // outermost quantile spread
};

// Forward-simulates every posterior draw from each country's last observed
// level; quantiles per period across draws. Reproducible under seed.
ProjectionFan project(const FitResult& fit, const ProjectionConfig& config);

// delta* = 2 x posterior median of tau_eps.
double shock_threshold(const NamedDraws& draws);

struct ShockCell {
  std::string country;
  Period period;
  double observed = 0.0;
  double median_delta = 0.0;
  double ci_low = 0.0;   // 95% credible interval
  double ci_high = 0.0;
  double exceedance = 0.0;  // P(delta > delta*)
  bool flagged = false;
  double corrected = 0.0;  // observed + median delta (shock removed)
};

struct ShockReport {
  double delta_star = 0.0;
  double prob_threshold = 0.975;
  std::vector<ShockCell> cells;
  int n_flagged() const;
};

ShockReport detect_shocks(const FitResult& fit, double delta_star, double prob_threshold = 0.975);

struct FanComparisonCell {
  std::string country;
  Period period;
  double median_diff = 0.0;  // a - b
  double width_ratio = 0.0;  // a / b
};

struct FanComparison {
  std::vector<FanComparisonCell> cells;
  double share_a_narrower_final = 0.0;  // fraction of countries, final period
};

FanComparison compare_fans(const ProjectionFan& a, const ProjectionFan& b);

CsvTable fan_to_csv(const ProjectionFan& fan);
CsvTable shock_report_to_csv(const ShockReport& report);

}  // namespace shockcast
