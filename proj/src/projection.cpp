#include "shockcast/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "shockcast/horseshoe.hpp"
#include "shockcast/rng.hpp"
#include "shockcast/spline.hpp"

namespace shockcast {

std::string to_string(ProjectionMode mode) {
  return mode == ProjectionMode::with_shock ? "with-shock" : "shock-free";
}

ProjectionMode projection_mode_from_string(const std::string& s) {
  if (s == "with-shock" || s == "with_shock") return ProjectionMode::with_shock;
  if (s == "shock-free" || s == "shock_free") return ProjectionMode::shock_free;
  throw std::invalid_argument("unknown projection mode '" + s + "'");
}

int ProjectionFan::country_index(const std::string& code) const {
  auto it = std::find(countries.begin(), countries.end(), code);
  return it == countries.end() ? -1 : static_cast<int>(it - countries.begin());
}

double ProjectionFan::width(int country, int period) const {
  const auto& q = quantiles[static_cast<std::size_t>(country)];
  return q(period, q.cols() - 1) - q(period, 0);
}

ProjectionFan project(const FitResult& fit, const ProjectionConfig& config) {
  if (config.horizon < 1) throw std::invalid_argument("project: horizon must be >= 1");
  if (config.quantiles.empty()) throw std::invalid_argument("project: no quantiles requested");
  if (!fit.convergence.converged && !config.allow_unconverged) {
    throw std::runtime_error("project: fit not converged (max split-Rhat " +
                             std::to_string(fit.convergence.max_rhat) +
                             "); pass allow_unconverged to override");
  }
  const bool with_shock = config.mode == ProjectionMode::with_shock;
  if (with_shock && !fit.config.horseshoe.shocks_enabled) {
    throw std::runtime_error("project: with-shock mode requires a fit with shocks enabled");
  }

  const SeriesPanel& panel = fit.panel;
  const NamedDraws& draws = fit.draws;
  const SplineConfig spline = fit.config.resolve_spline(panel);
  const int C = panel.n_countries();
  const int m = fit.config.n_coef();
  const int n_draws = draws.total_draws();
  const int last_t = panel.n_periods() - 1;

  std::vector<double> levels = config.quantiles;
  std::sort(levels.begin(), levels.end());

  ProjectionFan fan;
  fan.countries = panel.countries();
  for (int c = 0; c < C; ++c) fan.regions.push_back(panel.region(c));
  fan.quantile_levels = levels;
  fan.mode = config.mode;
  fan.draw_count = n_draws;
  Period p = panel.periods().back();
  for (int h = 0; h < config.horizon; ++h) {
    p = p.next();
    fan.periods.push_back(p);
  }

  // Column indices resolved once.
  std::vector<int> beta_cols(static_cast<std::size_t>(C) * m);
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < m; ++i) {
      beta_cols[static_cast<std::size_t>(c) * m + i] =
          draws.index("beta_star." + panel.country(c) + "." + std::to_string(i + 1));
      if (beta_cols[static_cast<std::size_t>(c) * m + i] < 0) {
        throw std::runtime_error("project: draws are missing beta_star columns for " +
                                 panel.country(c));
      }
    }
  }
  int tau_eps_col = draws.index("tau_eps");
  if (tau_eps_col < 0) throw std::runtime_error("project: draws are missing tau_eps");
  int tau_col = -1, vartheta_col = -1;
  if (with_shock) {
    tau_col = draws.index("tau");
    vartheta_col = draws.index("vartheta");
    if (tau_col < 0 || vartheta_col < 0) {
      throw std::runtime_error("project: draws are missing the shock scale parameters");
    }
  }

  int crisis_country = -1, crisis_step = -1;
  if (config.crisis) {
    crisis_country = panel.country_index(config.crisis->country);
    if (crisis_country < 0) {
      throw std::invalid_argument("project: crisis country not in panel");
    }
    for (int h = 0; h < static_cast<int>(fan.periods.size()); ++h) {
      if (fan.periods[static_cast<std::size_t>(h)] == config.crisis->period) crisis_step = h;
    }
    if (crisis_step < 0) {
      throw std::invalid_argument("project: crisis period not in the projection horizon");
    }
  }

  // traj[c] is horizon x n_draws.
  std::vector<Eigen::MatrixXd> traj(static_cast<std::size_t>(C));
  for (int c = 0; c < C; ++c) traj[static_cast<std::size_t>(c)].resize(config.horizon, n_draws);

  Eigen::VectorXd beta_star(m);
  for (int r = 0; r < n_draws; ++r) {
    // Separate noise streams so shock-free and with-shock runs share eps.
    std::mt19937_64 eps_rng = make_rng(config.seed, 2 * static_cast<std::uint64_t>(r));
    std::mt19937_64 shock_rng = make_rng(config.seed, 2 * static_cast<std::uint64_t>(r) + 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::cauchy_distribution<double> cauchy(0.0, 1.0);

    double tau_eps = draws.values()(r, tau_eps_col);
    double tau = with_shock ? draws.values()(r, tau_col) : 0.0;
    double vartheta = with_shock ? draws.values()(r, vartheta_col) : 0.0;

    for (int c = 0; c < C; ++c) {
      for (int i = 0; i < m; ++i) {
        beta_star(i) = draws.values()(r, beta_cols[static_cast<std::size_t>(c) * m + i]);
      }
      ConstrainedCoefficients coeffs = constrain_coefficients(beta_star, fit.config.bounds);

      double eta = panel.value(c, panel.last_observed(c));
      // Steps through any trailing gap first, then the requested horizon.
      int pre_steps = last_t - panel.last_observed(c);
      for (int step = 0; step < pre_steps + config.horizon; ++step) {
        double f = transition_f(spline, coeffs, eta);
        double eps = tau_eps * normal(eps_rng);
        double delta = 0.0;
        if (with_shock) {
          double g = std::abs(cauchy(shock_rng));
          double z = std::abs(normal(shock_rng));
          if (c == crisis_country && step - pre_steps == crisis_step) {
            g = config.crisis->gamma;
          }
          double gt2 = regularized_variance(g, tau, vartheta);
          delta = tau * std::sqrt(gt2) * z;
        }
        eta = eta + f - delta + eps;
        int h = step - pre_steps;
        if (h >= 0) traj[static_cast<std::size_t>(c)](h, r) = eta;
      }
    }
  }

  const int nq = static_cast<int>(levels.size());
  for (int c = 0; c < C; ++c) {
    Eigen::MatrixXd q(config.horizon, nq);
    for (int h = 0; h < config.horizon; ++h) {
      Eigen::VectorXd row = traj[static_cast<std::size_t>(c)].row(h).transpose();
      for (int k = 0; k < nq; ++k) q(h, k) = quantile(row, levels[static_cast<std::size_t>(k)]);
    }
    fan.quantiles.push_back(std::move(q));
  }
  return fan;
}

double shock_threshold(const NamedDraws& draws) {
  if (!draws.has("tau_eps")) {
    throw std::runtime_error("shock_threshold: draws do not contain tau_eps");
  }
  return 2.0 * median(draws.column("tau_eps"));
}

int ShockReport::n_flagged() const {
  int n = 0;
  for (const auto& cell : cells) n += cell.flagged ? 1 : 0;
  return n;
}

ShockReport detect_shocks(const FitResult& fit, double delta_star, double prob_threshold) {
  if (!fit.config.horseshoe.shocks_enabled) {
    throw std::runtime_error("detect_shocks: the fit has shocks disabled");
  }
  ParameterLayout layout =
      ParameterLayout::build(fit.panel, fit.config.n_coef(), /*shocks=*/true);

  ShockReport report;
  report.delta_star = delta_star;
  report.prob_threshold = prob_threshold;
  for (const auto& cell : layout.cells()) {
    const std::string country = fit.panel.country(cell.country);
    const Period period = fit.panel.periods()[cell.t];
    Eigen::VectorXd delta = fit.draws.column("delta." + country + "." + period.label());

    ShockCell out;
    out.country = country;
    out.period = period;
    out.observed = fit.panel.value(cell.country, cell.t);
    out.median_delta = median(delta);
    out.ci_low = quantile(delta, 0.025);
    out.ci_high = quantile(delta, 0.975);
    out.exceedance = (delta.array() > delta_star).cast<double>().mean();
    out.flagged = out.exceedance > prob_threshold;
    out.corrected = out.observed + out.median_delta;
    report.cells.push_back(std::move(out));
  }
  return report;
}

FanComparison compare_fans(const ProjectionFan& a, const ProjectionFan& b) {
  if (a.countries != b.countries) {
    throw std::invalid_argument("compare_fans: country sets differ");
  }
  if (a.periods.size() != b.periods.size() ||
      !std::equal(a.periods.begin(), a.periods.end(), b.periods.begin())) {
    throw std::invalid_argument("compare_fans: horizons differ");
  }
  if (a.quantile_levels != b.quantile_levels) {
    throw std::invalid_argument("compare_fans: quantile levels differ");
  }
  int median_idx = -1;
  for (std::size_t k = 0; k < a.quantile_levels.size(); ++k) {
    if (a.quantile_levels[k] == 0.5) median_idx = static_cast<int>(k);
  }

  FanComparison cmp;
  int narrower = 0;
  const int H = static_cast<int>(a.periods.size());
  for (int c = 0; c < static_cast<int>(a.countries.size()); ++c) {
    for (int h = 0; h < H; ++h) {
      FanComparisonCell cell;
      cell.country = a.countries[static_cast<std::size_t>(c)];
      cell.period = a.periods[static_cast<std::size_t>(h)];
      if (median_idx >= 0) {
        cell.median_diff = a.quantiles[static_cast<std::size_t>(c)](h, median_idx) -
                           b.quantiles[static_cast<std::size_t>(c)](h, median_idx);
      }
      double wb = b.width(c, h);
      cell.width_ratio = wb > 0.0 ? a.width(c, h) / wb : std::numeric_limits<double>::infinity();
      cmp.cells.push_back(std::move(cell));
    }
    if (a.width(c, H - 1) < b.width(c, H - 1)) ++narrower;
  }
  cmp.share_a_narrower_final = a.countries.empty()
                                    ? 0.0
                                    : static_cast<double>(narrower) / static_cast<double>(a.countries.size());
  return cmp;
}

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}
}  // namespace

CsvTable fan_to_csv(const ProjectionFan& fan) {
  CsvTable table;
  table.header = {"country", "region", "period", "mode"};
  for (double q : fan.quantile_levels) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "q%g", 100.0 * q);
    table.header.push_back(buf);
  }
  for (std::size_t c = 0; c < fan.countries.size(); ++c) {
    for (std::size_t h = 0; h < fan.periods.size(); ++h) {
      std::vector<std::string> row = {fan.countries[c], fan.regions[c], fan.periods[h].label(),
                                      to_string(fan.mode)};
      for (int k = 0; k < static_cast<int>(fan.quantile_levels.size()); ++k) {
        row.push_back(fmt(fan.quantiles[c](static_cast<int>(h), k)));
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

CsvTable shock_report_to_csv(const ShockReport& report) {
  CsvTable table;
  table.header = {"country",    "period",  "observed", "median_delta", "ci_low",
                  "ci_high",    "exceedance", "flagged", "corrected"};
  for (const auto& cell : report.cells) {
    table.rows.push_back({cell.country, cell.period.label(), fmt(cell.observed),
                          fmt(cell.median_delta), fmt(cell.ci_low), fmt(cell.ci_high),
                          fmt(cell.exceedance), cell.flagged ? "1" : "0", fmt(cell.corrected)});
  }
  return table;
}

}  // namespace shockcast
