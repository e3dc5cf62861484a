#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shockcast/diagnostics.hpp"
#include "shockcast/dist.hpp"
#include "shockcast/sampler.hpp"

using namespace shockcast;

namespace {

class StdNormal : public LogDensity {
 public:
  explicit StdNormal(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  bool value_and_gradient(const Eigen::VectorXd& theta, double& lp,
                          Eigen::VectorXd& grad) const override {
    lp = -0.5 * theta.squaredNorm();
    grad = -theta;
    return true;
  }

 private:
  int dim_;
};

// bivariate normal with unit variances and correlation rho
class CorrelatedNormal : public LogDensity {
 public:
  explicit CorrelatedNormal(double rho) : rho_(rho) {}
  int dim() const override { return 2; }
  bool value_and_gradient(const Eigen::VectorXd& t, double& lp,
                          Eigen::VectorXd& grad) const override {
    double det = 1.0 - rho_ * rho_;
    double q = (t(0) * t(0) - 2.0 * rho_ * t(0) * t(1) + t(1) * t(1)) / det;
    lp = -0.5 * q;
    grad.resize(2);
    grad(0) = -(t(0) - rho_ * t(1)) / det;
    grad(1) = -(t(1) - rho_ * t(0)) / det;
    return true;
  }

 private:
  double rho_;
};

}  // namespace

TEST_CASE("10-d standard normal is recovered within tolerance") {
  StdNormal model(10);
  SamplerConfig config;
  config.seed = 1234;
  PosteriorDraws draws = run_chains(model, config);
  REQUIRE(draws.n_chains() == 4);
  REQUIRE(draws.n_iterations() == 1000);

  for (int d = 0; d < 10; ++d) {
    Eigen::MatrixXd mat = draws.parameter_matrix(d);
    auto ess = effective_sample_size(mat);
    auto rhat = split_rhat(mat);
    REQUIRE(ess.has_value());
    REQUIRE(rhat.has_value());
    CHECK(*rhat < 1.02);

    double mean = mat.mean();
    double var = (mat.array() - mean).square().sum() / (mat.size() - 1);
    CHECK(std::abs(mean) < 3.0 / std::sqrt(*ess));
    CHECK(var > 0.9);
    CHECK(var < 1.1);
  }
  CHECK(draws.divergence_rate() < 0.01);
  for (const auto& chain : draws.chains) {
    CHECK(chain.step_size > 0.0);
    CHECK(std::isfinite(chain.step_size));
    CHECK(chain.inv_mass.minCoeff() > 0.0);
  }
}

TEST_CASE("correlated bivariate normal covariance within 15 percent") {
  CorrelatedNormal model(0.9);
  SamplerConfig config;
  config.seed = 77;
  config.n_sampling = 2000;
  PosteriorDraws draws = run_chains(model, config);

  // pool draws
  int total = draws.total_draws();
  Eigen::MatrixXd pooled(total, 2);
  int row = 0;
  for (const auto& chain : draws.chains) {
    pooled.block(row, 0, chain.draws.rows(), 2) = chain.draws;
    row += static_cast<int>(chain.draws.rows());
  }
  Eigen::Vector2d mean = pooled.colwise().mean();
  Eigen::MatrixXd centered = pooled.rowwise() - mean.transpose();
  Eigen::Matrix2d cov = centered.transpose() * centered / (total - 1);

  CHECK(std::abs(cov(0, 0) - 1.0) < 0.15);
  CHECK(std::abs(cov(1, 1) - 1.0) < 0.15);
  CHECK(std::abs(cov(0, 1) - 0.9) < 0.15);
  for (int d = 0; d < 2; ++d) {
    auto rhat = split_rhat(draws.parameter_matrix(d));
    REQUIRE(rhat.has_value());
    CHECK(*rhat < 1.02);
  }
}

TEST_CASE("same seed reproduces bitwise-identical draws") {
  StdNormal model(5);
  SamplerConfig config;
  config.seed = 99;
  config.n_warmup = 200;
  config.n_sampling = 300;
  PosteriorDraws a = run_chains(model, config);
  PosteriorDraws b = run_chains(model, config);
  for (int c = 0; c < a.n_chains(); ++c) {
    CHECK((a.chains[c].draws.array() == b.chains[c].draws.array()).all());
  }
  config.seed = 100;
  PosteriorDraws other = run_chains(model, config);
  CHECK_FALSE((a.chains[0].draws.array() == other.chains[0].draws.array()).all());
}

TEST_CASE("thread count does not change the draws") {
  StdNormal model(3);
  SamplerConfig config;
  config.seed = 5;
  config.n_warmup = 150;
  config.n_sampling = 200;
  config.threads = 1;
  PosteriorDraws serial = run_chains(model, config);
  config.threads = 4;
  PosteriorDraws parallel = run_chains(model, config);
  for (int c = 0; c < serial.n_chains(); ++c) {
    CHECK((serial.chains[c].draws.array() == parallel.chains[c].draws.array()).all());
  }
}

TEST_CASE("Kolmogorov-Smirnov smoke test on a 1-d normal with ESS-adjusted n") {
  StdNormal model(1);
  SamplerConfig config;
  config.seed = 4242;
  config.n_sampling = 2000;
  PosteriorDraws draws = run_chains(model, config);

  Eigen::MatrixXd mat = draws.parameter_matrix(0);
  auto ess = effective_sample_size(mat);
  REQUIRE(ess.has_value());

  std::vector<double> x(mat.data(), mat.data() + mat.size());
  std::sort(x.begin(), x.end());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double cdf = normal_cdf(x[i]);
    double hi = static_cast<double>(i + 1) / x.size();
    double lo = static_cast<double>(i) / x.size();
    d_stat = std::max({d_stat, std::abs(cdf - hi), std::abs(cdf - lo)});
  }
  // alpha = 0.01 critical value of sqrt(n_eff) * D is 1.628
  CHECK(d_stat * std::sqrt(std::min(*ess, static_cast<double>(x.size()))) < 1.628);
}

TEST_CASE("fixed-length HMC fallback also samples the normal") {
  StdNormal model(4);
  SamplerConfig config;
  config.nuts = false;
  config.leapfrog_steps = 16;
  config.seed = 31;
  PosteriorDraws draws = run_chains(model, config);
  for (int d = 0; d < 4; ++d) {
    Eigen::MatrixXd mat = draws.parameter_matrix(d);
    double mean = mat.mean();
    double var = (mat.array() - mean).square().sum() / (mat.size() - 1);
    CHECK(std::abs(mean) < 0.1);
    CHECK(std::abs(var - 1.0) < 0.15);
  }
}

TEST_CASE("invalid inputs error before sampling") {
  StdNormal model(2);
  SamplerConfig config;
  Eigen::VectorXd bad = Eigen::VectorXd::Constant(2, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(run_chains(model, config, {bad, bad, bad, bad}), std::invalid_argument);
  CHECK_THROWS_AS(run_chains(model, config, {Eigen::VectorXd::Zero(2)}), std::invalid_argument);
  config.target_accept = 1.5;
  CHECK_THROWS_AS(run_chains(model, config), std::invalid_argument);
}
