#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace shockcast {

// Hyperparameters of the regularized-horseshoe shock prior.
// slab_scale is s in vartheta^2 ~ InvGamma(nu/2, nu s^2 / 2); the default 10
// honors the tail-calibration targets (P(large shock > 20y) ~ 10%,
// P(> 100y) ~ 0). Set slab_scale = sqrt(10) for the literal s^2 = 10 reading.
struct HorseshoeConfig {
  double tau0 = 0.01;
  double nu = 6.0;
  double slab_scale = 10.0;
  bool shocks_enabled = true;
};

// gammatilde^2 = vartheta^2 gamma^2 / (vartheta^2 + tau^2 gamma^2).
double regularized_variance(double gamma, double tau, double vartheta);

// Constrained-space shock block: local scales, global scale, slab scale,
// and the shock magnitudes themselves (years).
struct ShockBlock {
  Eigen::VectorXd gamma;  // > 0
  double tau = 0.0;       // > 0
  double vartheta = 0.0;  // > 0
  Eigen::VectorXd delta;  // >= 0, same length as gamma

  Eigen::VectorXd regularized_variances() const;
};

struct ShockPriorEval {
  double value = 0.0;
  Eigen::VectorXd d_delta;
  Eigen::VectorXd d_gamma;
  double d_tau = 0.0;
  double d_vartheta = 0.0;
};

// Joint log prior density of (delta, gamma, tau, vartheta) in constrained
// space: half-normal deltas with variance tau^2 gammatilde^2, half-Cauchy
// local and global scales, inverse-gamma slab (density over vartheta^2,
// expressed as a density in vartheta).
ShockPriorEval shock_log_prior(const ShockBlock& block, const HorseshoeConfig& config);

// Solves for the slab scale s such that a half-Student-t(nu, s) satisfies
// P(X > tail_x) = tail_prob, then verifies P(X > cap_x) < cap_prob.
// Throws if the verification fails.
double calibrate_slab(double tail_x, double tail_prob, double cap_x, double cap_prob, double nu);

struct TuneRow {
  double tau0 = 0.0;
  double estimate = 0.0;  // P(delta > delta_star)
  double mc_se = 0.0;
};

// Monte Carlo prior-predictive exceedance probabilities over a tau0 grid.
std::vector<TuneRow> prior_predictive_tune(const std::vector<double>& tau0_grid,
                                           const HorseshoeConfig& config, double delta_star,
                                           std::int64_t n_sims, std::uint64_t seed);

}  // namespace shockcast
