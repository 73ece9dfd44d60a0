#include <catch2/catch_amalgamated.hpp>

#include "aoi/analytic.hpp"
#include "aoi/config_io.hpp"

using namespace aoi;
using nlohmann::json;

TEST_CASE("config json round-trip preserves results", "[config]") {
  SystemConfig c{3, {0.5, 1.0, 2.0}, 2, {0.25, 0.75}};
  c.validate();
  const SystemConfig back = config_from_json(config_to_json(c));
  CHECK(back.n_type1 == c.n_type1);
  CHECK(back.mu == c.mu);
  CHECK(back.m_type2 == c.m_type2);
  CHECK(back.lambda_each == c.lambda_each);
  CHECK(aoi_hybrid_exact(back).value == aoi_hybrid_exact(c).value);
}

TEST_CASE("homogeneous shorthand expands to constant vectors", "[config]") {
  const SystemConfig c = config_from_json(json{{"n_type1", 3},
                                               {"mu_each", 1.5},
                                               {"m_type2", 2},
                                               {"lambda_each", 0.5}});
  CHECK(c.mu == std::vector<double>{1.5, 1.5, 1.5});
  CHECK(c.lambda_each == std::vector<double>{0.5, 0.5});
}

TEST_CASE("loader rejects malformed configs", "[config]") {
  CHECK_THROWS_AS(config_from_json(json{{"n_type1", 2}, {"mu", {1.0}}}),
                  ValidationError);
  CHECK_THROWS_AS(
      config_from_json(json{{"n_type1", 1}, {"mu", {-1.0}}}),
      ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"n_type1", 1}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"n_type1", 1},
                                        {"mu", {1.0}},
                                        {"mu_each", 1.0}}),
                  ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"n_type1", 1},
                                        {"mu_each", 1.0},
                                        {"m_type2", 1}}),
                  ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
}
