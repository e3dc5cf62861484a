#include <doctest.h>

#include "shockcast/spline.hpp"
#include "shockcast/synthetic.hpp"
#include "test_util.hpp"

using namespace shockcast;

TEST_CASE("noise-free simulation reproduces the deterministic recursion") {
  SyntheticSpec spec = default_synthetic(2, 8, 5);
  spec.tau_eps = 0.0;
  SyntheticResult result = simulate_panel(spec);

  SplineConfig spline = spec.spline();
  for (int c = 0; c < 2; ++c) {
    ConstrainedCoefficients coeffs = constrain_coefficients(spec.beta_star[c], spec.bounds);
    double eta = spec.initial_levels[c];
    CHECK(result.panel.value(c, 0) == doctest::Approx(eta).epsilon(1e-12));
    for (int t = 1; t < 8; ++t) {
      eta = eta + transition_f(spline, coeffs, eta);
      CHECK(std::abs(result.panel.value(c, t) - eta) < 1e-12);
    }
  }
}

TEST_CASE("an injected shock dips exactly its magnitude below the clean path") {
  SyntheticSpec clean = default_synthetic(1, 8, 6);
  clean.tau_eps = 0.0;
  SyntheticSpec shocked = clean;
  shocked.shocks.push_back({0, 4, 8.0});

  SeriesPanel a = simulate_panel(clean).panel;
  SeriesPanel b = simulate_panel(shocked).panel;
  for (int t = 0; t < 4; ++t) CHECK(b.value(0, t) == doctest::Approx(a.value(0, t)));
  CHECK(a.value(0, 4) - b.value(0, 4) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(shocked.true_delta(0, 4) == 8.0);
  CHECK(shocked.true_delta(0, 3) == 0.0);
}

TEST_CASE("same seed gives identical panels") {
  auto a = test_util::synthetic_panel(4, 10, 99);
  auto b = test_util::synthetic_panel(4, 10, 99);
  REQUIRE(a.panel.n_observed_cells() == b.panel.n_observed_cells());
  for (int c = 0; c < 4; ++c) {
    for (int t = 0; t < 10; ++t) {
      CHECK(a.panel.value(c, t) == b.panel.value(c, t));
    }
  }
  auto other = test_util::synthetic_panel(4, 10, 100);
  bool any_diff = false;
  for (int c = 0; c < 4; ++c) {
    for (int t = 1; t < 10; ++t) {
      if (a.panel.value(c, t) != other.panel.value(c, t)) any_diff = true;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("escaping the admissible range errors after the retry cap") {
  SyntheticSpec spec = default_synthetic(1, 6, 3);
  spec.tau_eps = 0.0;
  spec.initial_levels[0] = 17.0;
  spec.shocks.push_back({0, 2, 12.0});  // forces the level below 15 deterministically
  CHECK_THROWS_WITH_AS(simulate_panel(spec), doctest::Contains("escaped"), std::runtime_error);
}

TEST_CASE("spec validation catches malformed inputs") {
  SyntheticSpec spec = default_synthetic(2, 6, 1);
  spec.shocks.push_back({0, 0, 5.0});  // period 0 has no transition
  CHECK_THROWS(simulate_panel(spec));
  spec.shocks.clear();
  spec.shocks.push_back({5, 2, 5.0});
  CHECK_THROWS(simulate_panel(spec));
  spec.shocks.clear();
  spec.shocks.push_back({0, 2, -1.0});
  CHECK_THROWS(simulate_panel(spec));
}
