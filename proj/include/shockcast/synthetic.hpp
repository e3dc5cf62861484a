#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "shockcast/panel.hpp"
#include "shockcast/spline.hpp"

namespace shockcast {

struct ShockInjection {
  int country = 0;       // 0-based country index
  int period_index = 0;  // 0-based destination period; transitions start at 1
  double magnitude = 0.0;  // years, > 0
};

// Ground truth for a forward-simulated panel.
struct SyntheticSpec {
  int n_countries = 0;
  int n_periods = 0;
  std::uint64_t seed = 1;
  int first_period_start = 1950;
  double tau_eps = 0.8;

  // Truth transition function.
  int basis_count = 6;
  int degree = 3;
  double level_low = 15.0;
  double level_high = 110.0;
  double knot_anchor = 85.0;
  SplineBounds bounds;

  std::vector<double> initial_levels;          // n_countries
  std::vector<Eigen::VectorXd> beta_star;      // per country, basis_count - 2
  std::vector<std::string> regions;            // optional; cycled defaults otherwise
  std::vector<ShockInjection> shocks;
  int retry_cap = 100;

  void validate() const;
  SplineConfig spline() const {
    return SplineConfig::make(basis_count, degree, level_low, level_high, knot_anchor);
  }
  double true_delta(int country, int period_index) const;
};

struct SyntheticResult {
  SeriesPanel panel;
  SyntheticSpec truth;
};

// Iterates eta_t = eta_{t-1} + f(eta_{t-1}) - delta_t + eps_t per country.
// Deterministic for a given seed; eps is resampled up to retry_cap when a
// step escapes the admissible level range.
SyntheticResult simulate_panel(const SyntheticSpec& spec);

// A plausible life-expectancy-like truth with hierarchically drawn
// coefficients; shocks are added by the caller.
SyntheticSpec default_synthetic(int n_countries, int n_periods, std::uint64_t seed);

}  // namespace shockcast
