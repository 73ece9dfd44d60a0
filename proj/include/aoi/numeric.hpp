#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

namespace aoi {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapExceededError : ValidationError {
  using ValidationError::ValidationError;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kahan compensated accumulator. Sums here mix terms spanning many orders of
// magnitude (combinatorial series, millions of enumeration terms), and the
// summation order is part of the determinism contract, so we keep one
// sequential compensated loop instead of anything fancier.
class KahanSum {
public:
  void add(double x) {
    const double y = x - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }

  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

inline double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(static_cast<double>(n + 1)) -
         std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

// x^e in log space where e==0 must yield exactly 0 contribution even for
// x == 0 (the 0*log(0) corner shows up when a rate vanishes).
inline double log_pow(double x, std::int64_t e) {
  if (e == 0) return 0.0;
  return static_cast<double>(e) * std::log(x);
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("loglog_slope: need two or more matching points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) throw ValidationError("loglog_slope: degenerate x grid");
  return sxy / sxx;
}

}  // namespace aoi
