#include "shockcast/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shockcast {

double inv_logit(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

SplineConfig SplineConfig::make(int basis_count, int degree, double level_low, double level_high,
                                double knot_anchor) {
  if (basis_count < 4) throw std::invalid_argument("basis_count must be >= 4");
  if (degree < 1 || degree > 7 || basis_count < degree + 1) {
    throw std::invalid_argument("degree must satisfy 1 <= degree <= min(7, basis_count - 1)");
  }
  if (!(level_low < level_high)) throw std::invalid_argument("level bounds must be ordered");
  if (!(knot_anchor > level_low)) {
    throw std::invalid_argument("knot anchor must exceed the lower level bound");
  }

  SplineConfig cfg;
  cfg.basis_count_ = basis_count;
  cfg.degree_ = degree;
  cfg.level_low_ = level_low;
  cfg.level_high_ = level_high;
  cfg.knot_anchor_ = knot_anchor;

  const double lo = 0.0;  // rescaled level_low
  const double hi = cfg.rescale(knot_anchor);
  const int n_interior = basis_count - degree - 1;
  cfg.knots_.assign(static_cast<std::size_t>(basis_count + degree + 1), 0.0);
  for (int i = 0; i <= degree; ++i) cfg.knots_[i] = lo;
  for (int i = 1; i <= n_interior; ++i) {
    cfg.knots_[degree + i] = lo + (hi - lo) * i / (n_interior + 1);
  }
  for (int i = basis_count; i <= basis_count + degree; ++i) cfg.knots_[i] = hi;
  return cfg;
}

namespace {

int find_span(const SplineConfig& cfg, double x) {
  const auto& t = cfg.knots();
  const int p = cfg.degree();
  const int n = cfg.basis_count();
  if (x >= t[n]) return n - 1;
  int k = p;
  while (k < n - 1 && x >= t[k + 1]) ++k;
  return k;
}

// All p+1 nonzero basis functions on the span (NURBS book A2.2).
void basis_funs(const SplineConfig& cfg, int span, double x, int p, double* out) {
  const auto& t = cfg.knots();
  double left[8], right[8];
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
}

}  // namespace

Eigen::VectorXd basis_eval(const SplineConfig& config, double x) {
  const int p = config.degree();
  const int K = config.basis_count();
  double xc = std::clamp(x, config.span_low(), config.span_high());
  int span = find_span(config, xc);
  double n[8];
  basis_funs(config, span, xc, p, n);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(K);
  for (int j = 0; j <= p; ++j) out(span - p + j) = n[j];
  return out;
}

Eigen::VectorXd basis_deriv(const SplineConfig& config, double x) {
  const int p = config.degree();
  const int K = config.basis_count();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(K);
  if (x < config.span_low() || x > config.span_high()) return out;  // clamped: flat outside

  const auto& t = config.knots();
  int span = find_span(config, x);
  // Degree p-1 basis on the same span: nonzero funcs are span-p+1 .. span.
  double lower[8];
  basis_funs(config, span, x, p - 1, lower);
  auto b_low = [&](int i) -> double {
    int off = i - (span - p + 1);
    return (off >= 0 && off <= p - 1) ? lower[off] : 0.0;
  };
  for (int i = span - p; i <= span; ++i) {
    double d = 0.0;
    double den1 = t[i + p] - t[i];
    if (den1 > 0.0) d += p / den1 * b_low(i);
    double den2 = t[i + p + 1] - t[i + 1];
    if (den2 > 0.0) d -= p / den2 * b_low(i + 1);
    out(i) = d;
  }
  return out;
}

ConstrainedCoefficients constrain_coefficients(const Eigen::VectorXd& beta_star,
                                               const SplineBounds& bounds) {
  const int m = static_cast<int>(beta_star.size());
  const int K = m + 2;
  ConstrainedCoefficients out;
  out.beta_prime.resize(K);
  for (int i = 0; i < K - 3; ++i) {
    out.beta_prime(i) = bounds.coef_low + (bounds.coef_high - bounds.coef_low) *
                                              inv_logit(beta_star(i));
  }
  double tail = bounds.coef_low + (bounds.asym_high - bounds.coef_low) * inv_logit(beta_star(m - 1));
  for (int i = K - 3; i < K; ++i) out.beta_prime(i) = tail;
  return out;
}

Eigen::VectorXd unconstrain_coefficients(const ConstrainedCoefficients& coeffs,
                                         const SplineBounds& bounds) {
  const int K = static_cast<int>(coeffs.beta_prime.size());
  Eigen::VectorXd star(K - 2);
  auto logit = [](double u) { return std::log(u / (1.0 - u)); };
  for (int i = 0; i < K - 3; ++i) {
    star(i) = logit((coeffs.beta_prime(i) - bounds.coef_low) / (bounds.coef_high - bounds.coef_low));
  }
  star(K - 3) = logit((coeffs.beta_prime(K - 1) - bounds.coef_low) /
                      (bounds.asym_high - bounds.coef_low));
  return star;
}

Eigen::VectorXd constrain_slopes(const Eigen::VectorXd& beta_star, const SplineBounds& bounds) {
  const int m = static_cast<int>(beta_star.size());
  const int K = m + 2;
  Eigen::VectorXd slopes(K);
  for (int i = 0; i < K - 3; ++i) {
    double s = inv_logit(beta_star(i));
    slopes(i) = (bounds.coef_high - bounds.coef_low) * s * (1.0 - s);
  }
  double s = inv_logit(beta_star(m - 1));
  double tail = (bounds.asym_high - bounds.coef_low) * s * (1.0 - s);
  for (int i = K - 3; i < K; ++i) slopes(i) = tail;
  return slopes;
}

double transition_f(const SplineConfig& config, const ConstrainedCoefficients& coeffs, double eta) {
  Eigen::VectorXd b = basis_eval(config, config.rescale(eta));
  return coeffs.beta_prime.dot(b);
}

TransitionGradient transition_f_grad(const SplineConfig& config, const Eigen::VectorXd& beta_star,
                                     double eta, const SplineBounds& bounds) {
  const int K = config.basis_count();
  const int m = static_cast<int>(beta_star.size());
  ConstrainedCoefficients coeffs = constrain_coefficients(beta_star, bounds);
  double x = config.rescale(eta);
  Eigen::VectorXd b = basis_eval(config, x);
  Eigen::VectorXd db = basis_deriv(config, x);

  TransitionGradient g;
  g.value = coeffs.beta_prime.dot(b);
  g.df_deta = coeffs.beta_prime.dot(db) / (config.level_high() - config.level_low());

  Eigen::VectorXd slopes = constrain_slopes(beta_star, bounds);
  g.df_dbeta_star = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < K - 3; ++i) g.df_dbeta_star(i) = b(i) * slopes(i);
  double tail_basis = b.tail(3).sum();
  g.df_dbeta_star(m - 1) = tail_basis * slopes(K - 1);
  return g;
}

}  // namespace shockcast
