#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "aoi/model.hpp"

namespace aoi {

// Configuration document:
//   {"n_type1": 2, "mu": [1.0, 2.0], "m_type2": 1, "lambda": [0.5]}
// Homogeneous shorthand replaces a vector with a scalar repeated count times:
//   {"n_type1": 3, "mu_each": 1.0, "m_type2": 2, "lambda_each": 0.5}
// Device indices referenced anywhere else (states, traces) are 1-based.

inline SystemConfig config_from_json(const nlohmann::json& j) {
  SystemConfig c;
  if (!j.contains("n_type1") || !j["n_type1"].is_number_integer())
    throw ValidationError("config: integer field n_type1 is required");
  c.n_type1 = j["n_type1"].get<int>();
  c.m_type2 = j.value("m_type2", 0);

  if (j.contains("mu") && j.contains("mu_each"))
    throw ValidationError("config: give either mu or mu_each, not both");
  if (j.contains("mu"))
    c.mu = j["mu"].get<std::vector<double>>();
  else if (j.contains("mu_each"))
    c.mu.assign(static_cast<std::size_t>(std::max(c.n_type1, 0)),
                j["mu_each"].get<double>());
  else if (c.n_type1 > 0)
    throw ValidationError("config: mu or mu_each is required when n_type1 > 0");

  if (j.contains("lambda") && j.contains("lambda_each"))
    throw ValidationError("config: give either lambda or lambda_each, not both");
  if (j.contains("lambda"))
    c.lambda_each = j["lambda"].get<std::vector<double>>();
  else if (j.contains("lambda_each"))
    c.lambda_each.assign(static_cast<std::size_t>(std::max(c.m_type2, 0)),
                         j["lambda_each"].get<double>());
  else if (c.m_type2 > 0)
    throw ValidationError(
        "config: lambda or lambda_each is required when m_type2 > 0");

  c.validate();
  return c;
}

inline nlohmann::json config_to_json(const SystemConfig& c) {
  return nlohmann::json{{"n_type1", c.n_type1},
                        {"mu", c.mu},
                        {"m_type2", c.m_type2},
                        {"lambda", c.lambda_each}};
}

inline SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace aoi
