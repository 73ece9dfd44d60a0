#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/numeric.hpp"

namespace aoi {

// One candidate deployment: n zero-wait sensors (unit cost each) and m
// instantaneous feeders (cost k each), all homogeneous.
struct DeploymentPoint {
  int n = 0;
  int m = 0;
  double cost = 0.0;
  double aoi = 0.0;
};

struct ThresholdInterval {
  double k = 0.0;
  double left = 0.0;   // largest grid budget below which only sensors win
  double right = 0.0;  // smallest grid budget above which only feeders win
  bool left_observed = false;   // grid showed a pure-sensor prefix
  bool right_observed = false;  // grid showed a pure-feeder suffix
};

// Evaluates deployments under fixed per-device rates, caching values across
// budgets so grid sweeps stay cheap. Age values go through the homogeneous
// closed forms: the pure-feeder row is 1/(m*lambda_i), everything else the
// homogeneous hybrid formula.
class DeploymentEvaluator {
public:
  DeploymentEvaluator(double k, double mu_i, double lambda_i)
      : k_(k), mu_i_(mu_i), lambda_i_(lambda_i) {
    if (!(k > 0.0) || !std::isfinite(k))
      throw ValidationError("k must be positive and finite");
    if (!(mu_i > 0.0) || !(lambda_i > 0.0))
      throw ValidationError("mu_i and lambda_i must be positive");
  }

  double k() const { return k_; }

  double aoi(int n, int m) const {
    if (n < 0 || m < 0 || (n == 0 && m == 0))
      throw ValidationError("deployment needs n >= 0, m >= 0, (n,m) != (0,0)");
    const std::uint64_t key =
        (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(m);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double v;
    if (n == 0)
      v = 1.0 / (m * lambda_i_);
    else
      v = detail::hybrid_homogeneous_regrouped(n, n * mu_i_, m * lambda_i_);
    cache_.emplace(key, v);
    return v;
  }

  // Exhaustive scan of every feasible integer pair with n + k*m <= budget.
  // Ties go to fewer feeders, then fewer sensors.
  DeploymentPoint optimal(double budget) const {
    const int m_max = static_cast<int>(std::floor(budget / k_ + 1e-9));
    bool found = false;
    DeploymentPoint best;
    for (int m = 0; m <= m_max; ++m) {
      const int n_max =
          static_cast<int>(std::floor(budget - k_ * m + 1e-9));
      for (int n = (m == 0 ? 1 : 0); n <= n_max; ++n) {
        const double v = aoi(n, m);
        if (!found || v < best.aoi) {
          best = {n, m, n + k_ * m, v};
          found = true;
        }
      }
    }
    if (!found)
      throw ValidationError("budget " + std::to_string(budget) +
                            " cannot afford any device");
    return best;
  }

private:
  double k_, mu_i_, lambda_i_;
  mutable std::unordered_map<std::uint64_t, double> cache_;
};

inline DeploymentPoint optimal_deployment(double k, double d_cost,
                                          double mu_i, double lambda_i) {
  return DeploymentEvaluator(k, mu_i, lambda_i).optimal(d_cost);
}

// Classifies the optimum along a budget grid and reports the interval
// between the last all-sensor prefix budget and the first all-feeder suffix
// budget; mixed optima can only occur in between. Missing pure regions at
// the grid ends are flagged (grid too coarse or too short).
inline ThresholdInterval threshold_interval(double k, double mu_i,
                                            double lambda_i,
                                            const std::vector<double>& d_grid) {
  if (d_grid.empty()) throw ValidationError("empty budget grid");
  for (std::size_t i = 1; i < d_grid.size(); ++i)
    if (!(d_grid[i] > d_grid[i - 1]))
      throw ValidationError("budget grid must be strictly increasing");

  DeploymentEvaluator eval(k, mu_i, lambda_i);
  enum { pure1, pure2, mixed };
  std::vector<int> cls;
  cls.reserve(d_grid.size());
  for (double d : d_grid) {
    const DeploymentPoint p = eval.optimal(d);
    cls.push_back(p.m == 0 ? pure1 : (p.n == 0 ? pure2 : mixed));
  }

  ThresholdInterval out;
  out.k = k;
  for (std::size_t i = 0; i < cls.size() && cls[i] == pure1; ++i) {
    out.left = d_grid[i];
    out.left_observed = true;
  }
  for (std::size_t i = cls.size(); i-- > 0 && cls[i] == pure2;) {
    out.right = d_grid[i];
    out.right_observed = true;
  }
  return out;
}

struct SurfaceRow {
  int n = 0;
  int m = 0;
  double aoi = 0.0;
  double ratio = 0.0;  // relative to the all-sensor point (m = 0)
};

// Every feasible deployment under the budget, normalized by the m = 0
// point's age.
inline std::vector<SurfaceRow> aoi_surface(double k, double d_cost,
                                           double mu_i, double lambda_i) {
  if (!(d_cost >= 1.0))
    throw ValidationError("aoi_surface needs d_cost >= 1");
  DeploymentEvaluator eval(k, mu_i, lambda_i);
  const int n_budget = static_cast<int>(std::floor(d_cost + 1e-9));
  const double base = eval.aoi(n_budget, 0);
  std::vector<SurfaceRow> rows;
  const int m_max = static_cast<int>(std::floor(d_cost / k + 1e-9));
  for (int m = 0; m <= m_max; ++m) {
    const int n_max = static_cast<int>(std::floor(d_cost - k * m + 1e-9));
    for (int n = (m == 0 ? 1 : 0); n <= n_max; ++n)
      rows.push_back({n, m, eval.aoi(n, m), eval.aoi(n, m) / base});
  }
  return rows;
}

}  // namespace aoi
