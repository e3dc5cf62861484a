#include "shockcast/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "shockcast/dist.hpp"

namespace shockcast {

SplineConfig ModelConfig::resolve_spline(const SeriesPanel& panel) const {
  double anchor = knot_anchor ? *knot_anchor : panel.max_observed();
  return SplineConfig::make(basis_count, degree, level_low, level_high, anchor);
}

ParameterLayout ParameterLayout::build(const SeriesPanel& panel, int n_coef, bool shocks) {
  ParameterLayout layout;
  layout.n_countries_ = panel.n_countries();
  layout.n_coef_ = n_coef;
  layout.shocks_ = shocks;
  layout.cell_begin_.assign(panel.n_countries() + 1, 0);
  for (int c = 0; c < panel.n_countries(); ++c) {
    layout.cell_begin_[c] = static_cast<int>(layout.cells_.size());
    for (int t = panel.first_observed(c) + 1; t <= panel.last_observed(c); ++t) {
      layout.cells_.push_back({c, t});
    }
  }
  layout.cell_begin_[panel.n_countries()] = static_cast<int>(layout.cells_.size());

  int dim = panel.n_countries() * n_coef + 2 * n_coef + 1;
  if (shocks) dim += 2 * layout.n_cells() + 2;
  layout.dim_ = dim;
  return layout;
}

std::vector<int> ParameterLayout::positive_indices() const {
  std::vector<int> idx;
  for (int i = 0; i < n_coef_; ++i) idx.push_back(log_sigma(i));
  idx.push_back(log_tau_eps_sq());
  if (shocks_) {
    for (int cell = 0; cell < n_cells(); ++cell) idx.push_back(u_z(cell));
    for (int cell = 0; cell < n_cells(); ++cell) idx.push_back(u_gamma(cell));
    idx.push_back(log_tau());
    idx.push_back(log_vartheta());
  }
  return idx;
}

JacobianEval transform_log_jacobian(const Eigen::VectorXd& theta, const ParameterLayout& layout) {
  if (theta.size() != layout.dim()) {
    throw std::invalid_argument("transform_log_jacobian: theta length does not match layout");
  }
  JacobianEval out;
  out.grad = Eigen::VectorXd::Zero(theta.size());
  for (int idx : layout.positive_indices()) {
    out.value += theta(idx);
    out.grad(idx) = 1.0;
  }
  return out;
}

ShockModel::ShockModel(const SeriesPanel& panel, const ModelConfig& config)
    : panel_(panel),
      config_(config),
      spline_(config.resolve_spline(panel)),
      layout_(ParameterLayout::build(panel, config.n_coef(), config.horseshoe.shocks_enabled)) {
  if (!config_.knot_anchor) config_.knot_anchor = spline_.knot_anchor();
  const int n_cells = layout_.n_cells();
  basis_.resize(n_cells, spline_.basis_count());
  level_step_.resize(n_cells);
  for (int i = 0; i < n_cells; ++i) {
    const auto& cell = layout_.cells()[i];
    double prev = panel_.value(cell.country, cell.t - 1);
    double cur = panel_.value(cell.country, cell.t);
    basis_.row(i) = basis_eval(spline_, spline_.rescale(prev)).transpose();
    level_step_(i) = cur - prev;
  }
}

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwo = 0.6931471805599453;
constexpr double kLogPi = 1.1447298858494002;
constexpr double kLogTwoPi = 1.8378770664093453;
}  // namespace

// Single pass over likelihood and priors; grad may be null (value only).
// loglik_out, when non-null, receives the likelihood component alone.
double ShockModel::evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad,
                            double* loglik_out) const {
  const ParameterLayout& L = layout_;
  if (theta.size() != L.dim()) {
    throw std::invalid_argument("log_posterior: parameter vector length " +
                                std::to_string(theta.size()) + " does not match layout dim " +
                                std::to_string(L.dim()));
  }
  const int C = L.n_countries();
  const int m = L.n_coef();
  const int K = spline_.basis_count();
  const int n_cells = L.n_cells();
  const auto& hs = config_.horseshoe;
  const auto& hier = config_.hierarchy;

  if (grad) grad->setZero(L.dim());

  double lp = 0.0;
  double loglik = 0.0;

  const double u_v = theta(L.log_tau_eps_sq());
  const double v = std::exp(u_v);  // tau_eps^2

  // Shock globals.
  double tau = 0.0, vt = 0.0, tau2 = 0.0, vt2 = 0.0;
  if (L.shocks()) {
    tau = std::exp(theta(L.log_tau()));
    vt = std::exp(theta(L.log_vartheta()));
    tau2 = tau * tau;
    vt2 = vt * vt;
  }

  // Hierarchy scales, needed to assemble per-country coefficients from the
  // non-centered offsets.
  Eigen::VectorXd sigma(m);
  for (int i = 0; i < m; ++i) sigma(i) = std::exp(theta(L.log_sigma(i)));

  // Likelihood over observed transitions plus the per-cell shock machinery.
  Eigen::VectorXd beta_prime(K), slopes(K), grad_bp(K), bs(m);
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < m; ++i) {
      bs(i) = theta(L.beta_bar(i)) + sigma(i) * theta(L.coef_raw(c, i));
    }
    for (int i = 0; i < K - 3; ++i) {
      double s = inv_logit(bs(i));
      beta_prime(i) = config_.bounds.coef_low + (config_.bounds.coef_high - config_.bounds.coef_low) * s;
      slopes(i) = (config_.bounds.coef_high - config_.bounds.coef_low) * s * (1.0 - s);
    }
    {
      double s = inv_logit(bs(m - 1));
      double tail = config_.bounds.coef_low + (config_.bounds.asym_high - config_.bounds.coef_low) * s;
      double tail_slope = (config_.bounds.asym_high - config_.bounds.coef_low) * s * (1.0 - s);
      for (int k = K - 3; k < K; ++k) {
        beta_prime(k) = tail;
        slopes(k) = tail_slope;
      }
    }
    grad_bp.setZero();

    for (int cell = L.cell_begin(c); cell < L.cell_end(c); ++cell) {
      double f = basis_.row(cell).dot(beta_prime);
      double delta = 0.0;
      double w = 0.0, z = 0.0, g = 0.0, den = 0.0;
      if (L.shocks()) {
        z = std::exp(theta(L.u_z(cell)));
        g = std::exp(theta(L.u_gamma(cell)));
        den = vt2 + tau2 * g * g;
        w = tau * vt * g / std::sqrt(den);  // sd of delta given z = 1
        delta = w * z;
      }
      double r = level_step_(cell) - f + delta;
      loglik += -0.5 * kLogTwoPi - 0.5 * u_v - 0.5 * r * r / v;

      if (grad) {
        double dll_dr = -r / v;
        grad_bp.noalias() -= dll_dr * basis_.row(cell).transpose();
        (*grad)(L.log_tau_eps_sq()) += -0.5 + 0.5 * r * r / v;
        if (L.shocks()) {
          double sq = std::sqrt(den);
          double dw_dg = tau * vt * vt2 / (den * sq);
          double dw_dtau = vt * vt2 * g / (den * sq);
          double dw_dvt = tau * tau2 * g * g * g / (den * sq);
          (*grad)(L.u_z(cell)) += dll_dr * w * z;
          (*grad)(L.u_gamma(cell)) += dll_dr * z * g * dw_dg;
          (*grad)(L.log_tau()) += dll_dr * z * tau * dw_dtau;
          (*grad)(L.log_vartheta()) += dll_dr * z * vt * dw_dvt;
        }
      }
    }

    if (grad) {
      auto spread = [&](int i, double g_star) {
        double eta = theta(L.coef_raw(c, i));
        (*grad)(L.coef_raw(c, i)) += g_star * sigma(i);
        (*grad)(L.beta_bar(i)) += g_star;
        (*grad)(L.log_sigma(i)) += g_star * sigma(i) * eta;
      };
      for (int i = 0; i < K - 3; ++i) spread(i, grad_bp(i) * slopes(i));
      spread(m - 1, (grad_bp(K - 3) + grad_bp(K - 2) + grad_bp(K - 1)) * slopes(K - 1));
    }
  }
  lp += loglik;

  // Hierarchy, non-centered: beta_star = beta_bar + sigma * eta, eta ~ N(0,1).
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < C; ++c) {
      double eta = theta(L.coef_raw(c, i));
      lp += -0.5 * kLogTwoPi - 0.5 * eta * eta;
      if (grad) (*grad)(L.coef_raw(c, i)) += -eta;
    }
    double bbar = theta(L.beta_bar(i));
    double u_s = theta(L.log_sigma(i));
    // beta_bar_i ~ N(0, mean_sd)
    lp += normal_lpdf(bbar, 0.0, hier.mean_sd);
    if (grad) (*grad)(L.beta_bar(i)) += -bbar / (hier.mean_sd * hier.mean_sd);
    // sigma_i ~ N+(0, scale_sd), plus exp-map jacobian
    lp += half_normal_lpdf(sigma(i), hier.scale_sd) + u_s;
    if (grad) {
      (*grad)(L.log_sigma(i)) += -sigma(i) * sigma(i) / (hier.scale_sd * hier.scale_sd) + 1.0;
    }
  }

  // Smoothing variance: tau_eps^2 ~ InvGamma(shape, rate), plus jacobian.
  {
    double a = hier.smoothing_shape, b = hier.smoothing_rate;
    lp += a * std::log(b) - std::lgamma(a) - (a + 1.0) * u_v - b / v + u_v;
    if (grad) (*grad)(L.log_tau_eps_sq()) += -(a + 1.0) + b / v + 1.0;
  }

  if (L.shocks()) {
    // Non-centered shock scale: z ~ N+(0,1), gamma ~ C+(0,1), with jacobians.
    for (int cell = 0; cell < n_cells; ++cell) {
      double u_zc = theta(L.u_z(cell));
      double z = std::exp(u_zc);
      lp += kLogTwo - 0.5 * kLogTwoPi - 0.5 * z * z + u_zc;
      if (grad) (*grad)(L.u_z(cell)) += -z * z + 1.0;

      double u_g = theta(L.u_gamma(cell));
      double g = std::exp(u_g);
      double g2 = g * g;
      lp += kLogTwo - kLogPi - std::log1p(g2) + u_g;
      if (grad) (*grad)(L.u_gamma(cell)) += -2.0 * g2 / (1.0 + g2) + 1.0;
    }
    // tau ~ C+(0, tau0), log scale.
    {
      double t0_2 = hs.tau0 * hs.tau0;
      lp += kLogTwo - kLogPi - std::log(hs.tau0) - std::log1p(tau2 / t0_2) + theta(L.log_tau());
      if (grad) (*grad)(L.log_tau()) += -2.0 * tau2 / (t0_2 + tau2) + 1.0;
    }
    // vartheta^2 ~ InvGamma(nu/2, nu s^2/2), sampled as log vartheta.
    {
      double a = 0.5 * hs.nu;
      double b = 0.5 * hs.nu * hs.slab_scale * hs.slab_scale;
      double u_t = theta(L.log_vartheta());
      lp += a * std::log(b) - std::lgamma(a) - (a + 1.0) * 2.0 * u_t - b / vt2 + kLogTwo + 2.0 * u_t;
      if (grad) (*grad)(L.log_vartheta()) += -2.0 * (a + 1.0) + 2.0 * b / vt2 + 2.0;
    }
  }

  if (loglik_out) *loglik_out = loglik;
  return lp;
}

bool ShockModel::value_and_gradient(const Eigen::VectorXd& theta, double& lp,
                                    Eigen::VectorXd& grad) const {
  lp = evaluate(theta, &grad, nullptr);
  if (!std::isfinite(lp) || !grad.allFinite()) {
    lp = kNegInf;
    return false;
  }
  return true;
}

double ShockModel::log_likelihood(const Eigen::VectorXd& theta) const {
  double loglik = 0.0;
  evaluate(theta, nullptr, &loglik);
  return loglik;
}

double ShockModel::log_prior(const Eigen::VectorXd& theta) const {
  double loglik = 0.0;
  double lp = evaluate(theta, nullptr, &loglik);
  return lp - loglik;
}

std::vector<std::string> ShockModel::constrained_names() const {
  const ParameterLayout& L = layout_;
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(L.dim()));
  for (int c = 0; c < L.n_countries(); ++c) {
    for (int i = 0; i < L.n_coef(); ++i) {
      names.push_back("beta_star." + panel_.country(c) + "." + std::to_string(i + 1));
    }
  }
  for (int i = 0; i < L.n_coef(); ++i) names.push_back("beta_bar." + std::to_string(i + 1));
  for (int i = 0; i < L.n_coef(); ++i) names.push_back("sigma." + std::to_string(i + 1));
  names.push_back("tau_eps");
  if (L.shocks()) {
    for (const auto& cell : L.cells()) {
      names.push_back("delta." + panel_.country(cell.country) + "." +
                      panel_.periods()[cell.t].label());
    }
    for (const auto& cell : L.cells()) {
      names.push_back("gamma." + panel_.country(cell.country) + "." +
                      panel_.periods()[cell.t].label());
    }
    names.push_back("tau");
    names.push_back("vartheta");
  }
  return names;
}

Eigen::VectorXd ShockModel::constrain(const Eigen::VectorXd& theta) const {
  const ParameterLayout& L = layout_;
  if (theta.size() != L.dim()) throw std::invalid_argument("constrain: dimension mismatch");
  Eigen::VectorXd out(L.dim());
  int pos = 0;
  for (int c = 0; c < L.n_countries(); ++c) {
    for (int i = 0; i < L.n_coef(); ++i) {
      out(pos++) = theta(L.beta_bar(i)) + std::exp(theta(L.log_sigma(i))) * theta(L.coef_raw(c, i));
    }
  }
  for (int i = 0; i < L.n_coef(); ++i) out(pos++) = theta(L.beta_bar(i));
  for (int i = 0; i < L.n_coef(); ++i) out(pos++) = std::exp(theta(L.log_sigma(i)));
  out(pos++) = std::exp(0.5 * theta(L.log_tau_eps_sq()));  // tau_eps (sd)
  if (L.shocks()) {
    double tau = std::exp(theta(L.log_tau()));
    double vt = std::exp(theta(L.log_vartheta()));
    for (int cell = 0; cell < L.n_cells(); ++cell) {
      double z = std::exp(theta(L.u_z(cell)));
      double g = std::exp(theta(L.u_gamma(cell)));
      double gt2 = regularized_variance(g, tau, vt);
      out(pos++) = tau * std::sqrt(gt2) * z;  // delta, years
    }
    for (int cell = 0; cell < L.n_cells(); ++cell) {
      out(pos++) = std::exp(theta(L.u_gamma(cell)));
    }
    out(pos++) = tau;
    out(pos++) = vt;
  }
  return out;
}

Eigen::VectorXd ShockModel::unconstrain(const Eigen::VectorXd& constrained) const {
  const ParameterLayout& L = layout_;
  if (constrained.size() != L.dim()) throw std::invalid_argument("unconstrain: dimension mismatch");
  Eigen::VectorXd theta(L.dim());
  const int nb = L.n_countries() * L.n_coef();
  for (int i = 0; i < L.n_coef(); ++i) {
    theta(L.beta_bar(i)) = constrained(nb + i);
    theta(L.log_sigma(i)) = std::log(constrained(nb + L.n_coef() + i));
  }
  for (int c = 0; c < L.n_countries(); ++c) {
    for (int i = 0; i < L.n_coef(); ++i) {
      double star = constrained(static_cast<Eigen::Index>(c) * L.n_coef() + i);
      theta(L.coef_raw(c, i)) =
          (star - constrained(nb + i)) / constrained(nb + L.n_coef() + i);
    }
  }
  int pos = nb + 2 * L.n_coef();
  theta(L.log_tau_eps_sq()) = 2.0 * std::log(constrained(pos++));
  if (L.shocks()) {
    const int n = L.n_cells();
    double tau = constrained(pos + 2 * n);
    double vt = constrained(pos + 2 * n + 1);
    for (int cell = 0; cell < n; ++cell) {
      double delta = constrained(pos + cell);
      double g = constrained(pos + n + cell);
      double gt2 = regularized_variance(g, tau, vt);
      theta(L.u_z(cell)) = std::log(delta / (tau * std::sqrt(gt2)));
      theta(L.u_gamma(cell)) = std::log(g);
    }
    theta(L.log_tau()) = std::log(tau);
    theta(L.log_vartheta()) = std::log(vt);
  }
  return theta;
}

}  // namespace shockcast
