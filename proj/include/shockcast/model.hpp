#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "shockcast/horseshoe.hpp"
#include "shockcast/log_density.hpp"
#include "shockcast/panel.hpp"
#include "shockcast/spline.hpp"

namespace shockcast {

struct HierarchyConfig {
  double mean_sd = 15.0;  // beta_bar_i ~ N(0, mean_sd)
  double scale_sd = 5.0;  // sigma_i ~ N+(0, scale_sd)
  double smoothing_shape = 0.1;  // tau_eps^2 ~ InvGamma(shape, rate)
  double smoothing_rate = 0.1;
};

struct ModelConfig {
  int basis_count = 6;
  int degree = 3;
  double level_low = 15.0;
  double level_high = 110.0;
  // Fixed at fit time from the training panel when unset.
  std::optional<double> knot_anchor;
  SplineBounds bounds;
  HorseshoeConfig horseshoe;
  HierarchyConfig hierarchy;

  SplineConfig resolve_spline(const SeriesPanel& panel) const;
  int n_coef() const { return basis_count - 2; }
};

// One observed transition: periods t-1 and t both observed for a country.
struct TransitionCell {
  int country = 0;
  int t = 0;  // index of the destination period
};

// Index map for the flat unconstrained parameter vector.
//
//   [coef_raw (country-major, n_coef each; standardized offsets eta_{c,i},
//    with beta_star_{c,i} = beta_bar_i + sigma_i * eta_{c,i})]
//   [beta_bar (n_coef)] [log sigma (n_coef)] [log tau_eps^2]
//   [u_z per cell] [u_gamma per cell] [log tau] [log vartheta]   (shocks only)
class ParameterLayout {
 public:
  static ParameterLayout build(const SeriesPanel& panel, int n_coef, bool shocks);

  int dim() const { return dim_; }
  bool shocks() const { return shocks_; }
  int n_countries() const { return n_countries_; }
  int n_coef() const { return n_coef_; }
  int n_cells() const { return static_cast<int>(cells_.size()); }
  const std::vector<TransitionCell>& cells() const { return cells_; }
  // Cells are country-major; [cell_begin(c), cell_end(c)) spans country c.
  int cell_begin(int c) const { return cell_begin_[c]; }
  int cell_end(int c) const { return cell_begin_[c + 1]; }

  int coef_raw(int c, int i) const { return c * n_coef_ + i; }
  int beta_bar(int i) const { return n_countries_ * n_coef_ + i; }
  int log_sigma(int i) const { return n_countries_ * n_coef_ + n_coef_ + i; }
  int log_tau_eps_sq() const { return n_countries_ * n_coef_ + 2 * n_coef_; }
  int u_z(int cell) const { return log_tau_eps_sq() + 1 + cell; }
  int u_gamma(int cell) const { return log_tau_eps_sq() + 1 + n_cells() + cell; }
  int log_tau() const { return log_tau_eps_sq() + 1 + 2 * n_cells(); }
  int log_vartheta() const { return log_tau() + 1; }

  // Indices of every exp-mapped positive parameter.
  std::vector<int> positive_indices() const;

 private:
  int dim_ = 0;
  bool shocks_ = false;
  int n_countries_ = 0;
  int n_coef_ = 0;
  std::vector<TransitionCell> cells_;
  std::vector<int> cell_begin_;
};

// Sum of log|d constrained / d unconstrained| over all exp-mapped positive
// parameters, with its (sparse) gradient.
struct JacobianEval {
  double value = 0.0;
  Eigen::VectorXd grad;
};
JacobianEval transform_log_jacobian(const Eigen::VectorXd& theta, const ParameterLayout& layout);

// Full unnormalized log posterior of the transition model with optional
// regularized-horseshoe shocks, over the unconstrained vector.
class ShockModel : public LogDensity {
 public:
  ShockModel(const SeriesPanel& panel, const ModelConfig& config);

  int dim() const override { return layout_.dim(); }
  bool value_and_gradient(const Eigen::VectorXd& theta, double& lp,
                          Eigen::VectorXd& grad) const override;

  // Components (used by tests and diagnostics; value-only paths).
  double log_likelihood(const Eigen::VectorXd& theta) const;
  double log_prior(const Eigen::VectorXd& theta) const;

  // Interpretable (constrained) view of a draw and its inverse.
  std::vector<std::string> constrained_names() const;
  Eigen::VectorXd constrain(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd unconstrain(const Eigen::VectorXd& constrained) const;

  const ParameterLayout& layout() const { return layout_; }
  const SplineConfig& spline() const { return spline_; }
  const ModelConfig& config() const { return config_; }
  const SeriesPanel& panel() const { return panel_; }

 private:
  struct Eval;
  double evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad, double* loglik_out) const;

  SeriesPanel panel_;
  ModelConfig config_;
  SplineConfig spline_;
  ParameterLayout layout_;
  Eigen::MatrixXd basis_;       // n_cells x K, basis at the source level
  Eigen::VectorXd level_step_;  // n_cells, eta_t - eta_{t-1}
};

}  // namespace shockcast
