#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "shockcast/spline.hpp"

using namespace shockcast;

namespace {
SplineConfig default_config(double anchor = 85.0) {
  return SplineConfig::make(6, 3, 15.0, 110.0, anchor);
}
}  // namespace

TEST_CASE("knot vector is clamped with evenly spaced interior knots") {
  SplineConfig cfg = default_config();
  const auto& t = cfg.knots();
  REQUIRE(t.size() == 10);
  double hi = (85.0 - 15.0) / 95.0;
  for (int i = 0; i <= 3; ++i) CHECK(t[i] == 0.0);
  for (int i = 6; i <= 9; ++i) CHECK(t[i] == doctest::Approx(hi));
  CHECK(t[4] == doctest::Approx(hi / 3.0));
  CHECK(t[5] == doctest::Approx(2.0 * hi / 3.0));
  CHECK(cfg.rescale(15.0) == doctest::Approx(0.0));
  CHECK(cfg.rescale(110.0) == doctest::Approx(1.0));
}

TEST_CASE("partition of unity at random points in the span") {
  SplineConfig cfg = default_config();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(cfg.span_low(), cfg.span_high());
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd b = basis_eval(cfg, u(rng));
    CHECK(b.minCoeff() >= 0.0);
    CHECK(std::abs(b.sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("clamped-end basis values") {
  SplineConfig cfg = default_config();
  Eigen::VectorXd left = basis_eval(cfg, cfg.span_low());
  CHECK(left(0) == doctest::Approx(1.0));
  CHECK(left.tail(5).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  Eigen::VectorXd right = basis_eval(cfg, cfg.span_high());
  CHECK(right(5) == doctest::Approx(1.0));
  CHECK(right.head(5).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("evaluation beyond the span equals the clamped boundary") {
  SplineConfig cfg = default_config();
  Eigen::VectorXd beyond = basis_eval(cfg, cfg.span_high() + 0.7);
  Eigen::VectorXd at_end = basis_eval(cfg, cfg.span_high());
  CHECK((beyond - at_end).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  Eigen::VectorXd before = basis_eval(cfg, cfg.span_low() - 3.0);
  Eigen::VectorXd at_start = basis_eval(cfg, cfg.span_low());
  CHECK((before - at_start).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("coefficient constraint transform hits the documented anchors") {
  Eigen::VectorXd star = Eigen::VectorXd::Zero(4);
  ConstrainedCoefficients c = constrain_coefficients(star);
  CHECK(c.beta_prime(0) == doctest::Approx(5.0005));
  CHECK(c.beta_prime(1) == doctest::Approx(5.0005));
  CHECK(c.beta_prime(2) == doctest::Approx(5.0005));
  // the three tied trailing coefficients
  CHECK(c.beta_prime(3) == doctest::Approx(0.5755));
  CHECK(c.beta_prime(4) == doctest::Approx(0.5755));
  CHECK(c.beta_prime(5) == doctest::Approx(0.5755));
  CHECK(c.asymptote() == doctest::Approx(0.5755));

  star(0) = -40.0;
  CHECK(constrain_coefficients(star).beta_prime(0) == doctest::Approx(0.001));
  star(0) = 40.0;
  CHECK(constrain_coefficients(star).beta_prime(0) == doctest::Approx(10.0));
  star(3) = -40.0;
  CHECK(constrain_coefficients(star).beta_prime(5) == doctest::Approx(0.001));
  star(3) = 40.0;
  CHECK(constrain_coefficients(star).beta_prime(5) == doctest::Approx(1.15));
}

TEST_CASE("unconstrain inverts constrain") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd star(4);
    for (int i = 0; i < 4; ++i) star(i) = n(rng);
    Eigen::VectorXd back = unconstrain_coefficients(constrain_coefficients(star));
    CHECK((back - star).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("transition function: all-ones coefficients give f = 1 everywhere") {
  SplineConfig cfg = default_config();
  ConstrainedCoefficients c;
  c.beta_prime = Eigen::VectorXd::Ones(6);
  for (double eta : {15.0, 22.0, 47.3, 60.0, 84.9, 85.0, 100.0, 120.0}) {
    CHECK(transition_f(cfg, c, eta) == doctest::Approx(1.0));
  }
}

TEST_CASE("transition function: clamped tail returns the asymptotic coefficient") {
  SplineConfig cfg = default_config();
  ConstrainedCoefficients c;
  c.beta_prime.resize(6);
  c.beta_prime << 4.0, 2.5, 1.7, 0.9, 0.9, 0.9;
  CHECK(transition_f(cfg, c, 120.0) == doctest::Approx(0.9));
  CHECK(transition_f(cfg, c, 110.0) == doctest::Approx(0.9));
  CHECK(transition_f(cfg, c, 85.0) == doctest::Approx(0.9));  // knot anchor
}

TEST_CASE("transition function matches the naive recursive oracle") {
  SplineConfig cfg = default_config(82.5);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.5);
  std::uniform_real_distribution<double> level(16.0, 82.0);
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd star(4);
    for (int i = 0; i < 4; ++i) star(i) = n(rng);
    ConstrainedCoefficients c = constrain_coefficients(star);
    double eta = level(rng);
    double x = cfg.rescale(eta);
    double expected = 0.0;
    for (int k = 0; k < 6; ++k) {
      expected += c.beta_prime(k) * oracles::bspline_basis(cfg.knots(), k, 3, x);
    }
    CHECK(oracles::rel_err(transition_f(cfg, c, eta), expected) < 1e-10);
  }
}

TEST_CASE("transition gradients match central finite differences") {
  SplineConfig cfg = default_config();
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.2);
  std::uniform_real_distribution<double> level(16.5, 84.0);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd star(4);
    for (int i = 0; i < 4; ++i) star(i) = n(rng);
    double eta = level(rng);
    TransitionGradient g = transition_f_grad(cfg, star, eta);

    auto f_eta = [&](double e) {
      return transition_f(cfg, constrain_coefficients(star), e);
    };
    double h = 1e-5;
    double fd_eta = (f_eta(eta + h) - f_eta(eta - h)) / (2.0 * h);
    CHECK(oracles::rel_err_scaled(g.df_deta, fd_eta, 1e-2) < 1e-6);

    Eigen::VectorXd fd = oracles::fd_gradient(
        [&](const Eigen::VectorXd& s) { return transition_f(cfg, constrain_coefficients(s), eta); },
        star, 1e-5);
    for (int i = 0; i < 4; ++i) {
      CHECK(oracles::rel_err_scaled(g.df_dbeta_star(i), fd(i), 1e-2) < 1e-6);
    }
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("derivative with respect to the level is zero outside the span") {
  SplineConfig cfg = default_config();
  Eigen::VectorXd star = Eigen::VectorXd::Constant(4, 0.3);
  CHECK(transition_f_grad(cfg, star, 120.0).df_deta == 0.0);
  CHECK(transition_f_grad(cfg, star, 10.0).df_deta == 0.0);

  // equal coefficients: constant f, zero derivative everywhere
  ConstrainedCoefficients c;
  c.beta_prime = Eigen::VectorXd::Constant(6, 0.7);
  for (double eta : {20.0, 45.0, 70.0, 84.0}) {
    Eigen::VectorXd db = basis_deriv(cfg, cfg.rescale(eta));
    CHECK(std::abs(c.beta_prime.dot(db)) < 1e-9);
  }
}

TEST_CASE("positivity and asymptotic bound over random admissible coefficients") {
  SplineConfig cfg = default_config(88.0);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> star_u(-6.0, 6.0);
  std::uniform_real_distribution<double> level(10.0, 130.0);
  for (int rep = 0; rep < 10000; ++rep) {
    Eigen::VectorXd star(4);
    for (int i = 0; i < 4; ++i) star(i) = star_u(rng);
    ConstrainedCoefficients c = constrain_coefficients(star);
    double eta = level(rng);
    double f = transition_f(cfg, c, eta);
    CHECK(f > 0.0);
    CHECK(f <= 10.0);
    if (eta >= 110.0) CHECK(f <= 1.15);
  }
}
