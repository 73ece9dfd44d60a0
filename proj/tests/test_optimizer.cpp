#include <catch2/catch_amalgamated.hpp>

#include "aoi/optimizer.hpp"

using namespace aoi;
using Catch::Approx;

TEST_CASE("optimal deployments at the reference budgets", "[optimizer]") {
  {
    const DeploymentPoint p = optimal_deployment(2.0, 100.0, 1.0, 1.0);
    CHECK(p.n == 0);
    CHECK(p.m == 50);
    CHECK(p.aoi == Approx(0.02).epsilon(1e-12));
  }
  {
    const DeploymentPoint p = optimal_deployment(16.0, 100.0, 1.0, 1.0);
    CHECK(p.n == 100);
    CHECK(p.m == 0);
  }
  {
    // (1,0) costs 1 with age 2; (0,1) costs 1 with age 1: feeder wins
    const DeploymentPoint p = optimal_deployment(1.0, 1.0, 1.0, 1.0);
    CHECK(p.n == 0);
    CHECK(p.m == 1);
    CHECK(p.aoi == 1.0);
  }
  CHECK_THROWS_AS(optimal_deployment(2.0, 0.5, 1.0, 1.0), ValidationError);
}

TEST_CASE("optimum is never beaten by any feasible point", "[optimizer]") {
  for (double k : {2.0, 7.0}) {
    for (double d : {13.0, 37.0, 60.0}) {
      DeploymentEvaluator eval(k, 1.0, 1.0);
      const DeploymentPoint best = eval.optimal(d);
      // independent second sweep in the opposite nesting order
      for (int n = 0; n <= static_cast<int>(d); ++n) {
        const int m_max = static_cast<int>(std::floor((d - n) / k + 1e-9));
        for (int m = (n == 0 ? 1 : 0); m <= m_max; ++m)
          CHECK(best.aoi <= eval.aoi(n, m));
      }
      CHECK(best.cost <= d + 1e-9);
    }
  }
}

TEST_CASE("deployment classes depend on the per-device rates", "[optimizer]") {
  // with unit rates the budget-150 optimum at k=16 is a mix, beating the
  // all-sensor point by about 5%
  const DeploymentPoint mixed = optimal_deployment(16.0, 150.0, 1.0, 1.0);
  CHECK(mixed.n == 54);
  CHECK(mixed.m == 6);
  CHECK(mixed.aoi == Approx(0.1015642).epsilon(1e-5));
  CHECK(mixed.aoi < DeploymentEvaluator(16.0, 1.0, 1.0).aoi(150, 0));
  // with four-times-faster sensors the all-sensor deployment wins
  const DeploymentPoint pure = optimal_deployment(16.0, 150.0, 4.0, 1.0);
  CHECK(pure.m == 0);
  CHECK(pure.n == 150);
}

TEST_CASE("optimal age is non-increasing in the budget", "[optimizer]") {
  DeploymentEvaluator eval(4.0, 1.0, 1.0);
  double prev = 1e300;
  for (int d = 1; d <= 60; ++d) {
    const double cur = eval.optimal(d).aoi;
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
}

TEST_CASE("threshold interval on a unit grid at k=2", "[optimizer]") {
  std::vector<double> grid;
  for (int d = 1; d <= 40; d += (d < 2 ? 1 : 2))
    grid.push_back(d);  // 1, then even budgets
  const ThresholdInterval t = threshold_interval(2.0, 1.0, 1.0, grid);
  CHECK(t.left_observed);
  CHECK(t.right_observed);
  CHECK(t.left == 1.0);
  CHECK(t.right == 2.0);
}

TEST_CASE("threshold boundaries grow with the feeder cost", "[optimizer]") {
  // budget grids aligned to the feeder cost so an all-feeder deployment can
  // spend the budget exactly; the sub-k prefix only affords sensors
  auto aligned_grid = [](double k, int max_d) {
    std::vector<double> g;
    for (int d = 1; d < static_cast<int>(k); ++d) g.push_back(d);
    for (int d = static_cast<int>(k); d <= max_d; d += static_cast<int>(k))
      g.push_back(d);
    return g;
  };
  const double ks[] = {2.0, 4.0, 8.0, 16.0};
  const int tops[] = {60, 80, 160, 480};
  double prev_left = 0.0, prev_right = 0.0;
  for (int i = 0; i < 4; ++i) {
    const ThresholdInterval t =
        threshold_interval(ks[i], 1.0, 1.0, aligned_grid(ks[i], tops[i]));
    REQUIRE(t.left_observed);
    REQUIRE(t.right_observed);
    CHECK(t.left >= prev_left);
    CHECK(t.right >= prev_right);
    CHECK(t.right / t.left >= 1.5);
    CHECK(t.right / t.left <= 2.5);
    prev_left = t.left;
    prev_right = t.right;
  }
}

TEST_CASE("threshold grid validation and coarse-grid flags", "[optimizer]") {
  CHECK_THROWS_AS(threshold_interval(2.0, 1.0, 1.0, {}), ValidationError);
  CHECK_THROWS_AS(threshold_interval(2.0, 1.0, 1.0, {5.0, 5.0}),
                  ValidationError);
  // grid entirely inside the feeder-dominant region: no sensor prefix
  const ThresholdInterval t =
      threshold_interval(2.0, 1.0, 1.0, {100.0, 150.0, 200.0});
  CHECK_FALSE(t.left_observed);
  CHECK(t.right_observed);
}

TEST_CASE("deployment surface normalization", "[optimizer]") {
  const auto rows = aoi_surface(4.0, 24.0, 1.0, 1.0);
  bool has_base = false, has_pure2 = false;
  for (const auto& r : rows) {
    CHECK(r.aoi > 0.0);
    CHECK(r.ratio > 0.0);
    if (r.n == 24 && r.m == 0) {
      CHECK(r.ratio == 1.0);
      has_base = true;
    }
    if (r.n == 0 && r.m == 6) {
      CHECK(r.aoi == Approx(1.0 / 6.0).epsilon(1e-12));
      has_pure2 = true;
    }
  }
  CHECK(has_base);
  CHECK(has_pure2);
}
