#pragma once

#include <Eigen/Core>
#include <vector>

namespace shockcast {

// Bounds for the constrained transition-function coefficients. The first
// K-3 weights live in (coef_low, coef_high); the three trailing weights are
// tied together and live in (coef_low, asym_high).
struct SplineBounds {
  double coef_low = 0.001;
  double coef_high = 10.0;
  double asym_high = 1.15;
};

// Cubic B-spline basis on the rescaled level x = (eta - level_low) /
// (level_high - level_low), with a clamped knot vector anchored at the
// maximum observed level. Evaluation clamps x to the knot span.
class SplineConfig {
 public:
  static SplineConfig make(int basis_count, int degree, double level_low, double level_high,
                           double knot_anchor);
  // Anchor at the maximum observed value of the panel.
  template <typename Panel>
  static SplineConfig from_panel(const Panel& panel, int basis_count = 6, int degree = 3,
                                 double level_low = 15.0, double level_high = 110.0) {
    return make(basis_count, degree, level_low, level_high, panel.max_observed());
  }

  int basis_count() const { return basis_count_; }
  int degree() const { return degree_; }
  double level_low() const { return level_low_; }
  double level_high() const { return level_high_; }
  double knot_anchor() const { return knot_anchor_; }
  const std::vector<double>& knots() const { return knots_; }

  double rescale(double eta) const { return (eta - level_low_) / (level_high_ - level_low_); }
  double span_low() const { return knots_[degree_]; }
  double span_high() const { return knots_[basis_count_]; }

 private:
  int basis_count_ = 6;
  int degree_ = 3;
  double level_low_ = 15.0;
  double level_high_ = 110.0;
  double knot_anchor_ = 0.0;
  std::vector<double> knots_;  // rescaled coordinates, clamped ends
};

struct ConstrainedCoefficients {
  Eigen::VectorXd beta_prime;  // K positive weights, last three equal
  double asymptote() const { return beta_prime(beta_prime.size() - 1); }
};

// Cox-de Boor evaluation of all K basis functions at x (clamped to the span).
Eigen::VectorXd basis_eval(const SplineConfig& config, double x);
// d/dx of each basis function; zero outside the span.
Eigen::VectorXd basis_deriv(const SplineConfig& config, double x);

ConstrainedCoefficients constrain_coefficients(const Eigen::VectorXd& beta_star,
                                               const SplineBounds& bounds = {});
// Inverse of constrain_coefficients (used when reloading persisted draws).
Eigen::VectorXd unconstrain_coefficients(const ConstrainedCoefficients& coeffs,
                                         const SplineBounds& bounds = {});
// d beta_prime[k] / d beta_star[i], exploiting the tied tail: returns the
// K-vector of slopes where entry k pairs with star index min(k, K-3).
Eigen::VectorXd constrain_slopes(const Eigen::VectorXd& beta_star, const SplineBounds& bounds = {});

double transition_f(const SplineConfig& config, const ConstrainedCoefficients& coeffs, double eta);

struct TransitionGradient {
  double value = 0.0;
  double df_deta = 0.0;
  Eigen::VectorXd df_dbeta_star;  // length K-2
};
TransitionGradient transition_f_grad(const SplineConfig& config, const Eigen::VectorXd& beta_star,
                                     double eta, const SplineBounds& bounds = {});

double inv_logit(double x);

}  // namespace shockcast
