#include "shockcast/horseshoe.hpp"

#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include "shockcast/dist.hpp"
#include "shockcast/rng.hpp"

namespace shockcast {

double regularized_variance(double gamma, double tau, double vartheta) {
  if (!(gamma > 0.0) || !(tau > 0.0) || !(vartheta > 0.0)) {
    throw std::invalid_argument("regularized_variance: inputs must be positive");
  }
  double v2 = vartheta * vartheta;
  double tg2 = tau * tau * gamma * gamma;
  return v2 * gamma * gamma / (v2 + tg2);
}

Eigen::VectorXd ShockBlock::regularized_variances() const {
  Eigen::VectorXd out(gamma.size());
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    out(i) = regularized_variance(gamma(i), tau, vartheta);
  }
  return out;
}

ShockPriorEval shock_log_prior(const ShockBlock& block, const HorseshoeConfig& config) {
  const Eigen::Index n = block.gamma.size();
  if (block.delta.size() != n) {
    throw std::invalid_argument("shock_log_prior: delta/gamma length mismatch");
  }
  if (!(block.tau > 0.0) || !(block.vartheta > 0.0)) {
    throw std::invalid_argument("shock_log_prior: tau and vartheta must be positive");
  }

  ShockPriorEval out;
  out.d_delta.setZero(n);
  out.d_gamma.setZero(n);

  const double tau = block.tau;
  const double vt = block.vartheta;
  const double vt2 = vt * vt;
  const double tau2 = tau * tau;

  for (Eigen::Index i = 0; i < n; ++i) {
    double g = block.gamma(i);
    double d = block.delta(i);
    if (!(g > 0.0) || d < 0.0) {
      throw std::invalid_argument("shock_log_prior: gamma must be > 0 and delta >= 0");
    }
    double g2 = g * g;
    double den = vt2 + tau2 * g2;
    double v = tau2 * vt2 * g2 / den;  // variance of the half-normal on delta

    out.value += half_normal_lpdf(d, std::sqrt(v));
    double dterm_dv = -0.5 / v + 0.5 * d * d / (v * v);
    double dv_dgamma = 2.0 * tau2 * vt2 * vt2 * g / (den * den);
    double dv_dtau = 2.0 * tau * vt2 * vt2 * g2 / (den * den);
    double dv_dvt = 2.0 * vt * tau2 * tau2 * g2 * g2 / (den * den);

    out.d_delta(i) = -d / v;
    out.d_gamma(i) = dterm_dv * dv_dgamma;
    out.d_tau += dterm_dv * dv_dtau;
    out.d_vartheta += dterm_dv * dv_dvt;

    // local scale: gamma ~ C+(0, 1)
    out.value += half_cauchy_lpdf(g, 1.0);
    out.d_gamma(i) += -2.0 * g / (1.0 + g2);
  }

  // global scale: tau ~ C+(0, tau0)
  out.value += half_cauchy_lpdf(tau, config.tau0);
  out.d_tau += -2.0 * tau / (config.tau0 * config.tau0 + tau2);

  // slab: vartheta^2 ~ InvGamma(nu/2, nu s^2/2), expressed as density in vartheta
  double a = 0.5 * config.nu;
  double b = 0.5 * config.nu * config.slab_scale * config.slab_scale;
  out.value += inv_gamma_lpdf(vt2, a, b) + std::log(2.0 * vt);
  out.d_vartheta += -(2.0 * a + 1.0) / vt + 2.0 * b / (vt2 * vt);

  return out;
}

double calibrate_slab(double tail_x, double tail_prob, double cap_x, double cap_prob, double nu) {
  if (!(tail_prob > 0.0 && tail_prob < 1.0) || !(cap_prob > 0.0 && cap_prob < 1.0)) {
    throw std::invalid_argument("calibrate_slab: probabilities must lie in (0,1)");
  }
  if (!(tail_x > 0.0 && cap_x > tail_x)) {
    throw std::invalid_argument("calibrate_slab: need 0 < tail_x < cap_x");
  }
  // P(|T_nu| * s > x) = 2 P(T_nu > x/s)
  double q = student_t_upper_quantile(0.5 * tail_prob, nu);
  double s = tail_x / q;
  double cap = 2.0 * student_t_tail(cap_x / s, nu);
  if (!(cap < cap_prob)) {
    throw std::runtime_error("calibrate_slab: no scale satisfies both constraints: P(X > " +
                             std::to_string(cap_x) + ") = " + std::to_string(cap) +
                             " >= " + std::to_string(cap_prob));
  }
  return s;
}

namespace {

TuneRow tune_one(double tau0, const HorseshoeConfig& config, double delta_star,
                 std::int64_t n_sims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::cauchy_distribution<double> cauchy(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double a = 0.5 * config.nu;
  const double b = 0.5 * config.nu * config.slab_scale * config.slab_scale;
  std::gamma_distribution<double> gamma_rng(a, 1.0 / b);

  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n_sims; ++i) {
    double tau = std::abs(tau0 * cauchy(rng));
    double vt2 = 1.0 / gamma_rng(rng);
    double g = std::abs(cauchy(rng));
    double gt2 = vt2 * g * g / (vt2 + tau * tau * g * g);
    double delta = std::abs(normal(rng)) * tau * std::sqrt(gt2);
    if (delta > delta_star) ++hits;
  }
  double p = static_cast<double>(hits) / static_cast<double>(n_sims);
  double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n_sims));
  return {tau0, p, se};
}

}  // namespace

std::vector<TuneRow> prior_predictive_tune(const std::vector<double>& tau0_grid,
                                           const HorseshoeConfig& config, double delta_star,
                                           std::int64_t n_sims, std::uint64_t seed) {
  if (tau0_grid.empty()) throw std::invalid_argument("prior_predictive_tune: empty tau0 grid");
  if (!(delta_star > 0.0)) throw std::invalid_argument("prior_predictive_tune: delta_star <= 0");
  if (n_sims < 100000) {
    throw std::invalid_argument("prior_predictive_tune: n_sims must be >= 1e5 per grid point");
  }

  std::vector<TuneRow> rows(tau0_grid.size());
  // Independent seeded streams per grid point; results do not depend on the
  // number of worker threads.
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned n_workers = std::min<unsigned>(hw, static_cast<unsigned>(tau0_grid.size()));
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < tau0_grid.size(); ++i) {
      rows[i] = tune_one(tau0_grid[i], config, delta_star, n_sims, stream_seed(seed, i));
    }
    return rows;
  }
  std::vector<std::thread> workers;
  std::size_t next = 0;
  std::mutex mu;
  for (unsigned w = 0; w < n_workers; ++w) {
    workers.emplace_back([&]() {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= tau0_grid.size()) return;
          i = next++;
        }
        rows[i] = tune_one(tau0_grid[i], config, delta_star, n_sims, stream_seed(seed, i));
      }
    });
  }
  for (auto& t : workers) t.join();
  return rows;
}

}  // namespace shockcast
