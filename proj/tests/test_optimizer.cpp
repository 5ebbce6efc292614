#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace distsense;

TEST_CASE("two-mode minimization endpoints") {
  const WeightVector w(std::vector<double>{0.5, -0.5});

  SECTION("all squeezing reaches the two-group bound with a trivial network") {
    const MinimizeResult r = minimize_two_mode(w, 10.0, 1.0);
    CHECK(r.converged);
    CHECK(r.qcrb == Catch::Approx(1.0 / 480.0).epsilon(1e-6));
    CHECK(r.qcrb == Catch::Approx(proposed_bound(w, 10.0)).epsilon(1e-6));
    CHECK(r.qcrb >= proposed_bound(w, 10.0) * (1.0 - 1e-6));
    CHECK(theta_lattice_distance(r.params.theta) < 1e-4);
    CHECK(r.params.a1_mag == 0.0);
    CHECK(r.params.a2_mag == 0.0);
    const double ns = std::sinh(r.params.r1) * std::sinh(r.params.r1) +
                      std::sinh(r.params.r2) * std::sinh(r.params.r2);
    CHECK(ns == Catch::Approx(10.0).epsilon(1e-8));
  }

  SECTION("all displacement reaches the shot-noise floor") {
    const MinimizeResult r = minimize_two_mode(w, 10.0, 0.0);
    CHECK(r.converged);
    CHECK(r.qcrb == Catch::Approx(0.025).epsilon(1e-6));
    CHECK(r.params.r1 == 0.0);
    CHECK(r.params.r2 == 0.0);
    const double nd = r.params.a1_mag * r.params.a1_mag +
                      r.params.a2_mag * r.params.a2_mag;
    CHECK(nd == Catch::Approx(10.0).epsilon(1e-8));
  }
}

TEST_CASE("restart robustness on the benchmark case") {
  const WeightVector w(std::vector<double>{0.7, -0.3});
  const MinimizeResult r = minimize_two_mode(w, 10.0, 1.0);
  CHECK(r.converged);
  CHECK(r.converged_restarts >= 12);
  CHECK(r.qcrb == Catch::Approx(proposed_bound(w, 10.0)).epsilon(1e-6));
  CHECK(theta_lattice_distance(r.params.theta) < 1e-4);

  // most restarts land on the same optimum, not just on some local one
  REQUIRE(r.restart_values.size() == 16);
  int close = 0;
  for (const double v : r.restart_values) {
    if (std::abs(v - r.qcrb) / r.qcrb < 1e-5) {
      ++close;
    }
  }
  CHECK(close >= 12);
}

TEST_CASE("ratio sweep is monotone with matching endpoints") {
  const WeightVector w(std::vector<double>{0.5, -0.5});
  const auto rows = sweep_ratio(w, 10.0, {0.0, 0.5, 1.0});
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.converged);
  }
  CHECK(rows[0].qcrb == Catch::Approx(0.025).epsilon(1e-6));
  CHECK(rows[2].qcrb == Catch::Approx(1.0 / 480.0).epsilon(1e-6));
  CHECK(rows[1].qcrb < rows[0].qcrb);
  CHECK(rows[2].qcrb < rows[1].qcrb);
}

TEST_CASE("argument validation") {
  const WeightVector w2(std::vector<double>{0.5, -0.5});
  const WeightVector w3(std::vector<double>{0.5, -0.3, 0.2});
  CHECK_THROWS_AS(minimize_two_mode(w3, 10.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(minimize_two_mode(w2, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(minimize_two_mode(w2, 10.0, 1.5), std::invalid_argument);
}
