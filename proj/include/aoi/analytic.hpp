#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/numeric.hpp"

namespace aoi {

enum class Method { theorem1, theorem2, corollary1, corollary2, remark1 };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::theorem1: return "theorem1";
    case Method::theorem2: return "theorem2";
    case Method::corollary1: return "corollary1";
    case Method::corollary2: return "corollary2";
    case Method::remark1: return "remark1";
  }
  return "?";
}

struct AoiResult {
  double value = 0.0;
  Method method = Method::theorem1;
  SystemConfig config;
};

namespace detail {

// Inner sum of the homogeneous N-sensor formula:
//   S1(N) = sum_{r=1..N} C(N-1, r-1) (r+1)! / N^(r+1).
// Successive terms are built from the ratio
//   t(r+1)/t(r) = ((N-r)/r) * (r+2) / N,
// which keeps every intermediate at the size of a genuine term, so the sum
// is overflow-free for N well past 1e5.
inline double homogeneous_sum(std::int64_t n) {
  KahanSum sum;
  double term = 2.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (std::int64_t r = 1; r <= n; ++r) {
    sum.add(term);
    term *= (static_cast<double>(n - r) / static_cast<double>(r)) *
            (static_cast<double>(r + 2) / static_cast<double>(n));
  }
  return sum.value();
}

}  // namespace detail

// Exact average age of a basic system: enumerate all N^N states and sum
// p(q) * M(q) / mu^(N+1). Zero-weight states (a zero-rate device appears in
// q) are skipped so they cannot perturb the compensated sum.
inline AoiResult aoi_basic_exact(const SystemConfig& config,
                                 std::uint64_t cap = kDefaultStateCap) {
  config.validate();
  if (config.m_type2 != 0)
    throw ValidationError("aoi_basic_exact requires m_type2 == 0");
  const double mu = config.mu_total();
  if (mu <= 0.0) throw ValidationError("total service rate must be positive");

  const UnifiedRate u = UnifiedRate::from_config(config, Variant::basic);
  StateSpace space(config.n_type1, Variant::basic, cap);
  KahanSum sum;
  space.for_each([&](std::span<const int> q) {
    const double w = state_weight(q, u);
    if (w == 0.0) return;
    sum.add(static_cast<double>(p_index(q)) * w);
  });
  const double denom = std::pow(mu, config.n_type1 + 1);
  return AoiResult{sum.value() / denom, Method::theorem1, config};
}

// Exact average age of a hybrid system over the (N+1)^N states, with the
// aggregated type-2 device as index N+1:
//   sum min{p(q), p~(q)} * U(q) / (mu+lambda)^(N+1).
// Covers the basic system exactly at lambda = 0 and the pure type-2 limit
// (all mu_i = 0) where only the all-(N+1) state has weight.
inline AoiResult aoi_hybrid_exact(const SystemConfig& config,
                                  std::uint64_t cap = kDefaultStateCap) {
  config.validate();
  const double total = config.mu_total() + config.lambda_total();
  if (total <= 0.0) throw ValidationError("total rate must be positive");

  const UnifiedRate u = UnifiedRate::from_config(config, Variant::hybrid);
  StateSpace space(config.n_type1, Variant::hybrid, cap);
  KahanSum sum;
  space.for_each([&](std::span<const int> q) {
    const double w = state_weight(q, u);
    if (w == 0.0) return;
    const int p = std::min(p_index(q), p_tilde_index(q));
    sum.add(static_cast<double>(p) * w);
  });
  const double denom = std::pow(total, config.n_type1 + 1);
  return AoiResult{sum.value() / denom, Method::theorem2, config};
}

// Homogeneous basic system, O(N):  (N/mu) * S1(N).
inline AoiResult aoi_basic_homogeneous(std::int64_t n, double mu_total) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (!(mu_total > 0.0) || !std::isfinite(mu_total))
    throw ValidationError("mu_total must be positive and finite");
  const double value =
      static_cast<double>(n) / mu_total * detail::homogeneous_sum(n);
  SystemConfig echo = SystemConfig::homogeneous(
      static_cast<int>(n), mu_total / static_cast<double>(n));
  return AoiResult{value, Method::corollary1, echo};
}

// Pure type-2 system: every arrival resets the monitor, so the age is the
// backward recurrence time of a Poisson process.
inline AoiResult aoi_type2_only(double lambda_total) {
  if (!(lambda_total > 0.0) || !std::isfinite(lambda_total))
    throw ValidationError("lambda_total must be positive and finite");
  SystemConfig echo;
  echo.m_type2 = 1;
  echo.lambda_each = {lambda_total};
  return AoiResult{1.0 / lambda_total, Method::remark1, echo};
}

namespace detail {

inline SystemConfig hybrid_echo(std::int64_t n, double mu_total,
                                double lambda_total) {
  SystemConfig echo;
  echo.n_type1 = static_cast<int>(n);
  echo.mu.assign(static_cast<std::size_t>(n),
                 mu_total / static_cast<double>(n));
  if (lambda_total > 0.0) {
    echo.m_type2 = 1;
    echo.lambda_each = {lambda_total};
  }
  return echo;
}

inline void check_hybrid_homogeneous_args(std::int64_t n, double mu_total,
                                          double lambda_total) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (!(mu_total >= 0.0) || !std::isfinite(mu_total))
    throw ValidationError("mu_total must be >= 0 and finite");
  if (!(lambda_total >= 0.0) || !std::isfinite(lambda_total))
    throw ValidationError("lambda_total must be >= 0 and finite");
  if (mu_total + lambda_total <= 0.0)
    throw ValidationError("mu_total + lambda_total must be positive");
}

// Leading term of the homogeneous hybrid formula:
//   (N/mu) * S1(N) * (mu/(mu+lambda))^(N+1)  ==  S1(N) * N * mu^N / (mu+lambda)^(N+1),
// evaluated in log space so mu = 0 degrades to 0 instead of inf * 0.
inline double hybrid_leading_term(std::int64_t n, double mu, double lambda) {
  const double scale = std::exp(std::log(static_cast<double>(n)) +
                                log_pow(mu, n) - log_pow(mu + lambda, n + 1));
  return homogeneous_sum(n) * scale;
}

}  // namespace detail

// Homogeneous hybrid system: leading basic term scaled by (mu/(mu+lambda))^(N+1)
// plus sum_k [A(k) + B(k)] over the states containing k type-2 deliveries.
// Per-k inner sums run over the repeat position p; the start terms are built
// in log space and successive terms via overflow-free ratios:
//   A: t(2,k) = 2 C(N-2,k) mu^(N-k) lambda^k / (N (mu+lambda)^(N+1)),
//      t(p+1)/t(p) = (N-p-k)/(N-p) * (N-p+1)/(p-1) * (p+1)/N,  p in [2, N-k]
//   B: t(1,k) = C(N-1,k-1) mu^(N-k) lambda^k / (mu+lambda)^(N+1),
//      t(p+1)/t(p) = (N-p-k+1)/(N-p) * (N-p+1)/p * (p+1)/N,    p in [1, N-k+1]
inline AoiResult aoi_hybrid_homogeneous(std::int64_t n, double mu_total,
                                        double lambda_total) {
  detail::check_hybrid_homogeneous_args(n, mu_total, lambda_total);
  if (lambda_total == 0.0) {
    AoiResult r = aoi_basic_homogeneous(n, mu_total);
    r.method = Method::corollary2;
    return r;
  }
  const double mu = mu_total;
  const double lambda = lambda_total;
  const double log_denom = log_pow(mu + lambda, n + 1);

  KahanSum tail;
  for (std::int64_t k = 1; k <= n; ++k) {
    const double log_rate_part = log_pow(mu, n - k) + log_pow(lambda, k);
    if (n - k >= 2) {  // A(k) exists only when N-k-1 > 0
      double t = std::exp(std::log(2.0) + log_binomial(n - 2, k) +
                          log_rate_part - std::log(static_cast<double>(n)) -
                          log_denom);
      for (std::int64_t p = 2; p <= n - k; ++p) {
        tail.add(t);
        if (p < n - k)
          t *= (static_cast<double>(n - p - k) / static_cast<double>(n - p)) *
               (static_cast<double>(n - p + 1) / static_cast<double>(p - 1)) *
               (static_cast<double>(p + 1) / static_cast<double>(n));
      }
    }
    double t = std::exp(log_binomial(n - 1, k - 1) + log_rate_part - log_denom);
    for (std::int64_t p = 1; p <= n - k + 1; ++p) {
      tail.add(t);
      if (p < n - k + 1)
        t *= (static_cast<double>(n - p - k + 1) /
              static_cast<double>(n - p)) *
             (static_cast<double>(n - p + 1) / static_cast<double>(p)) *
             (static_cast<double>(p + 1) / static_cast<double>(n));
    }
  }

  const double value =
      detail::hybrid_leading_term(n, mu, lambda) + tail.value();
  return AoiResult{value, Method::corollary2,
                   detail::hybrid_echo(n, mu_total, lambda_total)};
}

namespace detail {

// Same quantity as aoi_hybrid_homogeneous, with the k-sum collapsed through
// the binomial theorem so each repeat position p contributes one term:
//   A-part: sum_{p=2..N-1} C(N-1,p-2) p!/N^(p-1) mu^p [(mu+l)^(N-p) - mu^(N-p)] / (mu+l)^(N+1)
//   B-part: sum_{p=1..N}   C(N,p-1)  p!/N^(p-1) lambda mu^(p-1) (mu+l)^(N-p) / (mu+l)^(N+1)
// O(N) instead of O(N^2); used by the deployment sweeps. Cross-checked in
// the test suite against the literal per-k evaluation and the enumeration.
inline double hybrid_homogeneous_regrouped(std::int64_t n, double mu_total,
                                           double lambda_total) {
  check_hybrid_homogeneous_args(n, mu_total, lambda_total);
  if (lambda_total == 0.0)
    return static_cast<double>(n) / mu_total * homogeneous_sum(n);
  const double mu = mu_total;
  const double lambda = lambda_total;
  const double total = mu + lambda;
  const double rho = mu / total;

  KahanSum tail;
  // A-part. s(p) tracks the term without the [1 - rho^(N-p)] bracket:
  //   s(p) = C(N-1,p-2) p! mu^p (mu+l)^(N-p) / (N^(p-1) (mu+l)^(N+1)),
  // so s(2) = 2 mu^2 / (N (mu+l)^3).
  if (n >= 3 && mu > 0.0) {
    double s = 2.0 * mu * mu /
               (static_cast<double>(n) * total * total * total);
    for (std::int64_t p = 2; p <= n - 1; ++p) {
      tail.add(s * (1.0 - std::pow(rho, static_cast<double>(n - p))));
      s *= (static_cast<double>(n - p + 1) / static_cast<double>(p - 1)) *
           (static_cast<double>(p + 1) / static_cast<double>(n)) * rho;
    }
  }
  // B-part.
  double t = lambda / (total * total);
  for (std::int64_t p = 1; p <= n; ++p) {
    tail.add(t);
    t *= (static_cast<double>(n - p + 1) / static_cast<double>(p)) *
         (static_cast<double>(p + 1) / static_cast<double>(n)) * rho;
  }

  return hybrid_leading_term(n, mu, lambda) + tail.value();
}

}  // namespace detail

struct RatioRow {
  std::int64_t n = 0;
  std::int64_t m = 0;
  double ratio = 0.0;  // fraction, not percent
};

// Ratio of the homogeneous basic system's average age to the single-queue
// value, at a fixed per-device rate (the rate cancels).
inline std::vector<RatioRow> ratio_table_basic(
    const std::vector<std::int64_t>& n_list) {
  const double base = aoi_basic_homogeneous(1, 1.0).value;
  std::vector<RatioRow> rows;
  rows.reserve(n_list.size());
  for (std::int64_t n : n_list) {
    const double v =
        aoi_basic_homogeneous(n, static_cast<double>(n)).value;
    rows.push_back({n, 0, v / base});
  }
  return rows;
}

// Ratio of the homogeneous hybrid system's average age to the (N=1, M=1)
// value, with mu_i = lambda_i = 1 so mu = N and lambda = M.
inline std::vector<RatioRow> ratio_table_hybrid(
    const std::vector<std::int64_t>& n_list,
    const std::vector<std::int64_t>& m_list) {
  const double base = aoi_hybrid_homogeneous(1, 1.0, 1.0).value;
  std::vector<RatioRow> rows;
  rows.reserve(n_list.size() * m_list.size());
  for (std::int64_t n : n_list) {
    for (std::int64_t m : m_list) {
      const double v = aoi_hybrid_homogeneous(n, static_cast<double>(n),
                                              static_cast<double>(m))
                           .value;
      rows.push_back({n, m, v / base});
    }
  }
  return rows;
}

}  // namespace aoi
