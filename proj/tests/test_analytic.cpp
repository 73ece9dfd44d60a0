#include <catch2/catch_amalgamated.hpp>

#include "aoi/analytic.hpp"
#include "aoi/rng.hpp"
#include "aoi/table_data.hpp"

using namespace aoi;
using Catch::Approx;

TEST_CASE("basic exact enumeration values", "[analytic]") {
  CHECK(aoi_basic_exact(SystemConfig{1, {1.0}, 0, {}}).value == 2.0);
  CHECK(aoi_basic_exact(SystemConfig::homogeneous(2, 1.0)).value ==
        Approx(1.25).epsilon(1e-15));
  // four states by hand: (2*1 + 3*2 + 3*2 + 2*4) / 27
  CHECK(aoi_basic_exact(SystemConfig{2, {1.0, 2.0}, 0, {}}).value ==
        Approx(22.0 / 27.0).epsilon(1e-15));
}

TEST_CASE("basic homogeneous formula values", "[analytic]") {
  CHECK(aoi_basic_homogeneous(1, 1.0).value == 2.0);
  CHECK(aoi_basic_homogeneous(10, 10.0).value == Approx(0.4660).margin(5e-4));
  CHECK(aoi_basic_homogeneous(10000, 10000.0).value ==
        Approx(0.0126).margin(5e-4));
  CHECK_THROWS_AS(aoi_basic_homogeneous(0, 1.0), ValidationError);
  CHECK_THROWS_AS(aoi_basic_homogeneous(1, 0.0), ValidationError);
}

TEST_CASE("hybrid exact enumeration values", "[analytic]") {
  CHECK(aoi_hybrid_exact(SystemConfig{1, {1.0}, 1, {1.0}}).value ==
        Approx(0.75).epsilon(1e-15));
  CHECK(aoi_hybrid_exact(SystemConfig{1, {0.0}, 1, {2.0}}).value ==
        Approx(0.5).epsilon(1e-12));
  // nine states by hand at N=2, mu=(1,1), lambda=1: 17/27
  CHECK(aoi_hybrid_exact(SystemConfig::homogeneous(2, 1.0, 1, 1.0)).value ==
        Approx(17.0 / 27.0).epsilon(1e-15));
}

TEST_CASE("hybrid at lambda = 0 equals the basic system exactly",
          "[analytic]") {
  SplitMix64 rng(21);
  for (int n = 1; n <= 5; ++n) {
    SystemConfig basic;
    basic.n_type1 = n;
    for (int i = 0; i < n; ++i)
      basic.mu.push_back(0.2 + 2.0 * rng.next_unit_open());
    SystemConfig hybrid = basic;
    hybrid.m_type2 = 1;
    hybrid.lambda_each = {0.0};
    CHECK(aoi_hybrid_exact(hybrid).value == aoi_basic_exact(basic).value);
  }
}

TEST_CASE("pure type-2 limit equals 1/lambda", "[analytic]") {
  for (double lambda : {0.5, 1.0, 4.0}) {
    SystemConfig c{2, {0.0, 0.0}, 1, {lambda}};
    CHECK(aoi_hybrid_exact(c).value == Approx(1.0 / lambda).epsilon(1e-12));
  }
  CHECK(aoi_type2_only(1.0).value == 1.0);
  CHECK(aoi_type2_only(4.0).value == 0.25);
  CHECK(aoi_type2_only(0.5).value == 2.0);
  CHECK_THROWS_AS(aoi_type2_only(0.0), ValidationError);
}

TEST_CASE("hybrid homogeneous formula values", "[analytic]") {
  CHECK(aoi_hybrid_homogeneous(1, 1.0, 1.0).value ==
        Approx(0.75).epsilon(1e-14));
  CHECK(aoi_hybrid_homogeneous(1, 1.0, 5.0).value ==
        Approx(7.0 / 36.0).epsilon(1e-14));
  CHECK(aoi_hybrid_homogeneous(10, 10.0, 1.0).value ==
        Approx(0.4670 * 0.75).margin(5e-4));
}

TEST_CASE("exact and homogeneous formulas agree", "[analytic]") {
  for (int n = 1; n <= 6; ++n) {
    const double mu = 0.7 * n;
    CHECK(aoi_basic_exact(SystemConfig::homogeneous(n, 0.7)).value ==
          Approx(aoi_basic_homogeneous(n, mu).value).epsilon(1e-10));
  }
  for (int n = 1; n <= 5; ++n) {
    for (double lambda : {0.0, 0.3, 1.0, 4.0}) {
      SystemConfig c =
          SystemConfig::homogeneous(n, 1.1, lambda > 0 ? 1 : 0, lambda);
      CHECK(aoi_hybrid_exact(c).value ==
            Approx(aoi_hybrid_homogeneous(n, 1.1 * n, lambda).value)
                .epsilon(1e-10));
    }
  }
}

TEST_CASE("regrouped evaluation matches the per-k formula", "[analytic]") {
  SplitMix64 rng(97);
  for (int trial = 0; trial < 60; ++trial) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng.next_u64() % 40);
    const double mu = 0.2 + 3.0 * rng.next_unit_open();
    const double lambda = 3.0 * rng.next_unit_open();
    const double a = aoi_hybrid_homogeneous(n, mu, lambda).value;
    const double b = detail::hybrid_homogeneous_regrouped(n, mu, lambda);
    CHECK(b == Approx(a).epsilon(1e-11));
  }
  for (auto [n, mu, lambda] :
       {std::tuple{400LL, 400.0, 13.0}, std::tuple{1000LL, 1000.0, 30.0},
        std::tuple{1000LL, 250.0, 1.0}}) {
    CHECK(detail::hybrid_homogeneous_regrouped(n, mu, lambda) ==
          Approx(aoi_hybrid_homogeneous(n, mu, lambda).value).epsilon(1e-10));
  }
}

TEST_CASE("age is non-increasing in the type-2 rate", "[analytic]") {
  for (int n = 1; n <= 10; ++n) {
    double prev = aoi_hybrid_homogeneous(n, 1.0 * n, 0.0).value;
    for (int step = 1; step <= 10; ++step) {
      const double cur =
          aoi_hybrid_homogeneous(n, 1.0 * n, 0.5 * step).value;
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("basic exact age is symmetric under device relabeling",
          "[analytic]") {
  std::vector<double> rates{0.4, 1.1, 2.3, 0.9};
  const double reference =
      aoi_basic_exact(SystemConfig{4, rates, 0, {}}).value;
  std::sort(rates.begin(), rates.end());
  do {
    CHECK(aoi_basic_exact(SystemConfig{4, rates, 0, {}}).value ==
          Approx(reference).epsilon(1e-12));
  } while (std::next_permutation(rates.begin(), rates.end()));
}

TEST_CASE("rate scaling divides the age", "[analytic]") {
  SystemConfig c{3, {0.5, 1.25, 2.0}, 1, {0.75}};
  const double base = aoi_hybrid_exact(c).value;
  for (double scale : {2.0, 10.0}) {
    SystemConfig scaled = c;
    for (double& r : scaled.mu) r *= scale;
    for (double& r : scaled.lambda_each) r *= scale;
    CHECK(aoi_hybrid_exact(scaled).value ==
          Approx(base / scale).epsilon(1e-12));
  }
}

TEST_CASE("ratio tables reproduce the reference cells", "[analytic]") {
  const auto basic = ratio_table_basic({1, 3, 100});
  CHECK(basic[0].ratio == Approx(1.0).margin(5e-4));
  CHECK(basic[1].ratio == Approx(0.4815).margin(5e-4));
  CHECK(basic[2].ratio == Approx(0.0661).margin(5e-4));

  const auto hybrid = ratio_table_hybrid({1, 100}, {1, 10, 20});
  CHECK(hybrid[0].ratio == Approx(1.0).margin(5e-4));   // (1,1)
  CHECK(hybrid[1].ratio == Approx(0.1322).margin(5e-4));  // (1,10)
  CHECK(hybrid[5].ratio == Approx(0.0566).margin(5e-4));  // (100,20)
}

TEST_CASE("large enumerations stay consistent with the formulas",
          "[analytic]") {
  // basic N=7 walks 7^7 = 823543 states, hybrid N=6 walks 7^6
  CHECK(aoi_basic_exact(SystemConfig::homogeneous(7, 1.0)).value ==
        Approx(aoi_basic_homogeneous(7, 7.0).value).epsilon(1e-12));
  CHECK(aoi_hybrid_exact(SystemConfig::homogeneous(6, 1.0, 1, 2.0)).value ==
        Approx(aoi_hybrid_homogeneous(6, 6.0, 2.0).value).epsilon(1e-12));
}

TEST_CASE("enumeration sums are bit-stable across runs", "[analytic]") {
  SystemConfig c{4, {0.3, 1.7, 0.9, 2.2}, 1, {0.6}};
  CHECK(aoi_hybrid_exact(c).value == aoi_hybrid_exact(c).value);
  SystemConfig b{5, {0.3, 1.7, 0.9, 2.2, 1.1}, 0, {}};
  CHECK(aoi_basic_exact(b).value == aoi_basic_exact(b).value);
}
