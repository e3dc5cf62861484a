#include "shockcast/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "shockcast/rng.hpp"

namespace shockcast {

void SyntheticSpec::validate() const {
  if (n_countries < 1 || n_periods < 2) {
    throw std::invalid_argument("synthetic spec: need >= 1 country and >= 2 periods");
  }
  if (static_cast<int>(initial_levels.size()) != n_countries) {
    throw std::invalid_argument("synthetic spec: initial_levels must have one entry per country");
  }
  if (static_cast<int>(beta_star.size()) != n_countries) {
    throw std::invalid_argument("synthetic spec: beta_star must have one vector per country");
  }
  for (const auto& bs : beta_star) {
    if (bs.size() != basis_count - 2) {
      throw std::invalid_argument("synthetic spec: each beta_star must have basis_count-2 entries");
    }
  }
  if (!regions.empty() && static_cast<int>(regions.size()) != n_countries) {
    throw std::invalid_argument("synthetic spec: regions must be empty or per-country");
  }
  for (double lv : initial_levels) {
    if (!(lv > level_low && lv < level_high)) {
      throw std::invalid_argument("synthetic spec: initial level outside the admissible range");
    }
  }
  if (tau_eps < 0.0) throw std::invalid_argument("synthetic spec: tau_eps must be >= 0");
  for (const auto& s : shocks) {
    if (!(s.magnitude > 0.0)) {
      throw std::invalid_argument("synthetic spec: shock magnitudes must be > 0");
    }
    if (s.country < 0 || s.country >= n_countries) {
      throw std::invalid_argument("synthetic spec: shock country index out of range");
    }
    if (s.period_index < 1 || s.period_index >= n_periods) {
      throw std::invalid_argument("synthetic spec: shock period must be a transition (1.." +
                                  std::to_string(n_periods - 1) + ")");
    }
  }
}

double SyntheticSpec::true_delta(int country, int period_index) const {
  double d = 0.0;
  for (const auto& s : shocks) {
    if (s.country == country && s.period_index == period_index) d += s.magnitude;
  }
  return d;
}

namespace {
const char* kRegionCycle[] = {"Africa", "Americas", "Asia & Oceania", "Europe"};
}

SyntheticResult simulate_panel(const SyntheticSpec& spec) {
  spec.validate();
  SplineConfig spline = spec.spline();
  std::mt19937_64 rng = make_rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<SeriesPanel::Cell> cells;
  cells.reserve(static_cast<std::size_t>(spec.n_countries) * spec.n_periods);
  for (int c = 0; c < spec.n_countries; ++c) {
    char code[16];
    std::snprintf(code, sizeof(code), "S%03d", c + 1);
    std::string region =
        spec.regions.empty() ? kRegionCycle[c % 4] : spec.regions[static_cast<std::size_t>(c)];
    ConstrainedCoefficients coeffs = constrain_coefficients(spec.beta_star[c], spec.bounds);

    double eta = spec.initial_levels[c];
    cells.push_back({code, code, region, spec.first_period_start, eta});
    for (int t = 1; t < spec.n_periods; ++t) {
      double f = transition_f(spline, coeffs, eta);
      double delta = spec.true_delta(c, t);
      double next = 0.0;
      bool ok = false;
      for (int attempt = 0; attempt <= spec.retry_cap; ++attempt) {
        double eps = spec.tau_eps > 0.0 ? spec.tau_eps * normal(rng) : 0.0;
        next = eta + f - delta + eps;
        if (next > spec.level_low && next < spec.level_high) {
          ok = true;
          break;
        }
        if (spec.tau_eps == 0.0) break;  // resampling cannot change anything
      }
      if (!ok) {
        throw std::runtime_error("simulate_panel: country " + std::string(code) + " escaped (" +
                                 std::to_string(spec.level_low) + ", " +
                                 std::to_string(spec.level_high) + ") at period index " +
                                 std::to_string(t) + " after " + std::to_string(spec.retry_cap) +
                                 " retries");
      }
      eta = next;
      cells.push_back({code, code, region, spec.first_period_start + 5 * t, eta});
    }
  }

  SyntheticResult out{SeriesPanel::from_cells(std::move(cells),
                                              {spec.level_low, spec.level_high}),
                      spec};
  return out;
}

SyntheticSpec default_synthetic(int n_countries, int n_periods, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_countries = n_countries;
  spec.n_periods = n_periods;
  spec.seed = seed;

  std::mt19937_64 rng = make_rng(seed, 0xDEFA0017ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> level0(46.0, 62.0);

  // Hierarchy centers chosen so f starts near 2.5-3.5 years/period at low
  // levels and tapers toward ~0.6 in the asymptotic regime.
  const double logit035 = std::log(0.35 / 0.65);
  const double logit025 = std::log(0.25 / 0.75);
  const double logit015 = std::log(0.15 / 0.85);
  const double logit_tail = std::log(0.55 / 0.45);
  Eigen::VectorXd center(4);
  center << logit035, logit025, logit015, logit_tail;

  spec.initial_levels.resize(static_cast<std::size_t>(n_countries));
  spec.beta_star.resize(static_cast<std::size_t>(n_countries));
  for (int c = 0; c < n_countries; ++c) {
    spec.initial_levels[static_cast<std::size_t>(c)] = level0(rng);
    Eigen::VectorXd bs(4);
    for (int i = 0; i < 4; ++i) bs(i) = center(i) + 0.3 * normal(rng);
    spec.beta_star[static_cast<std::size_t>(c)] = bs;
  }
  return spec;
}

}  // namespace shockcast
