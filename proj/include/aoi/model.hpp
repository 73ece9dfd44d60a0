#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "aoi/numeric.hpp"

namespace aoi {

enum class Variant { basic, hybrid };

// Default ceiling on exact state-space size. Basic enumeration walks N^N
// states, hybrid (N+1)^N; past the cap callers must switch to the
// homogeneous formulas.
inline constexpr std::uint64_t kDefaultStateCap = 5'000'000;

// One monitored source served by N zero-wait sensors ("type-1", exponential
// service at rate mu[i]) and M instantaneous feeders ("type-2", Poisson
// arrivals at rate lambda_each[i], delivered with negligible service time).
// Device indices are 1-based everywhere to keep state vectors readable.
struct SystemConfig {
  int n_type1 = 0;
  std::vector<double> mu;           // per type-1 device, size n_type1
  int m_type2 = 0;
  std::vector<double> lambda_each;  // per type-2 device, size m_type2

  double mu_total() const {
    return std::accumulate(mu.begin(), mu.end(), 0.0);
  }

  // All type-2 devices act identically on the monitor (age resets to zero),
  // so only the aggregate arrival rate matters downstream.
  double lambda_total() const {
    return std::accumulate(lambda_each.begin(), lambda_each.end(), 0.0);
  }

  Variant variant() const {
    return m_type2 > 0 ? Variant::hybrid : Variant::basic;
  }

  void validate() const {
    if (n_type1 < 0) throw ValidationError("n_type1 must be >= 0");
    if (m_type2 < 0) throw ValidationError("m_type2 must be >= 0");
    if (static_cast<int>(mu.size()) != n_type1)
      throw ValidationError("mu must have exactly n_type1 entries");
    if (static_cast<int>(lambda_each.size()) != m_type2)
      throw ValidationError("lambda must have exactly m_type2 entries");
    for (double r : mu)
      if (!(r >= 0.0) || !std::isfinite(r))
        throw ValidationError("service rates must be finite and >= 0");
    for (double r : lambda_each)
      if (!(r >= 0.0) || !std::isfinite(r))
        throw ValidationError("arrival rates must be finite and >= 0");
    if (m_type2 == 0) {
      if (n_type1 < 1)
        throw ValidationError("a system without type-2 devices needs n_type1 >= 1");
      if (mu_total() <= 0.0)
        throw ValidationError("a system without type-2 devices needs total mu > 0");
    }
    if (mu_total() + lambda_total() <= 0.0)
      throw ValidationError("total rate mu + lambda must be positive");
  }

  static SystemConfig homogeneous(int n, double mu_each, int m = 0,
                                  double lambda_each_rate = 0.0) {
    SystemConfig c;
    c.n_type1 = n;
    c.mu.assign(static_cast<std::size_t>(std::max(n, 0)), mu_each);
    c.m_type2 = m;
    c.lambda_each.assign(static_cast<std::size_t>(std::max(m, 0)),
                         lambda_each_rate);
    c.validate();
    return c;
  }
};

inline double aggregate_type2(const SystemConfig& config) {
  return config.lambda_total();
}

// Source indices of the latest N delivered updates, newest first. Entries
// are device indices in 1..N for a basic system; the hybrid alphabet adds
// N+1 for the aggregated type-2 device.
struct DiscreteState {
  std::vector<int> sources;

  int size() const { return static_cast<int>(sources.size()); }
  // 1-based positional access matching the q(r) notation.
  int at(int r) const { return sources[static_cast<std::size_t>(r - 1)]; }

  bool operator==(const DiscreteState&) const = default;
};

inline int alphabet_size(int n, Variant variant) {
  return variant == Variant::basic ? n : n + 1;
}

inline void validate_state(const DiscreteState& q, int n, Variant variant) {
  if (q.size() != n)
    throw ValidationError("state must have exactly N entries");
  const int a = alphabet_size(n, variant);
  for (int s : q.sources)
    if (s < 1 || s > a)
      throw ValidationError("state entry outside the device alphabet");
}

// Position of the first source repeat: 1 + length of the longest prefix with
// pairwise-distinct entries. Equals N+1 iff all N entries are distinct
// (also for N = 0, where the empty state yields 1).
inline int p_index(std::span<const int> q) {
  const int n = static_cast<int>(q.size());
  for (int j = 1; j < n; ++j) {
    for (int h = 0; h < j; ++h) {
      if (q[static_cast<std::size_t>(j)] == q[static_cast<std::size_t>(h)])
        return j + 1;
    }
  }
  return n + 1;
}

inline int p_index(const DiscreteState& q) { return p_index(std::span<const int>(q.sources)); }

// Position of the latest update delivered by the aggregated type-2 device
// (index N+1); N+1 when no such update is among the latest N.
inline int p_tilde_index(std::span<const int> q) {
  const int n = static_cast<int>(q.size());
  for (int r = 0; r < n; ++r)
    if (q[static_cast<std::size_t>(r)] == n + 1) return r + 1;
  return n + 1;
}

inline int p_tilde_index(const DiscreteState& q) {
  return p_tilde_index(std::span<const int>(q.sources));
}

// Position of the latest update from type-1 device i; the device must occur
// in the state.
inline int p_device_index(std::span<const int> q, int device) {
  const int n = static_cast<int>(q.size());
  for (int r = 0; r < n; ++r)
    if (q[static_cast<std::size_t>(r)] == device) return r + 1;
  throw ValidationError("device " + std::to_string(device) +
                        " does not appear in the state");
}

inline int p_device_index(const DiscreteState& q, int device) {
  return p_device_index(std::span<const int>(q.sources), device);
}

// Unified per-index rate: mu_i for type-1 devices, the aggregate lambda for
// index N+1.
struct UnifiedRate {
  std::vector<double> rates;  // size N (basic) or N+1 (hybrid)

  static UnifiedRate from_config(const SystemConfig& config, Variant variant) {
    UnifiedRate u;
    u.rates = config.mu;
    if (variant == Variant::hybrid) u.rates.push_back(config.lambda_total());
    return u;
  }

  double at(int device) const {
    return rates[static_cast<std::size_t>(device - 1)];
  }

  double total() const {
    return std::accumulate(rates.begin(), rates.end(), 0.0);
  }
};

// Product of per-entry rates: M(q) for basic states, U(q) for hybrid states.
inline double state_weight(std::span<const int> q, const UnifiedRate& u) {
  double w = 1.0;
  for (int s : q) w *= u.at(s);
  return w;
}

inline double state_weight(const DiscreteState& q, const SystemConfig& config,
                           Variant variant) {
  validate_state(q, config.n_type1, variant);
  return state_weight(std::span<const int>(q.sources),
                      UnifiedRate::from_config(config, variant));
}

inline std::uint64_t state_space_size(int n, Variant variant) {
  const std::uint64_t a =
      static_cast<std::uint64_t>(alphabet_size(n, variant));
  std::uint64_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (a != 0 && count > kDefaultStateCap * 16) return count;  // saturate
    count *= a;
  }
  return count;
}

// Lexicographic enumeration of all length-N states over the variant's
// alphabet (an odometer over digits). Yields N^N or (N+1)^N states; N = 0
// yields the single empty state.
class StateSpace {
public:
  StateSpace(int n, Variant variant, std::uint64_t cap = kDefaultStateCap)
      : n_(n), alphabet_(alphabet_size(n, variant)) {
    if (n < 0) throw ValidationError("N must be >= 0");
    if (n > 0 && alphabet_ < 1)
      throw ValidationError("empty device alphabet");
    count_ = state_space_size(n, variant);
    if (count_ > cap)
      throw CapExceededError(
          "state space has " + std::to_string(count_) +
          " states, above the cap of " + std::to_string(cap) +
          "; use the homogeneous formulas instead");
  }

  std::uint64_t size() const { return count_; }
  int n() const { return n_; }
  int alphabet() const { return alphabet_; }

  // Visits states in lexicographic order. The visitor receives the 1-based
  // digit vector; it must not retain the reference.
  template <typename Visitor>
  void for_each(Visitor&& visit) const {
    std::vector<int> digits(static_cast<std::size_t>(n_), 1);
    if (n_ == 0) {
      visit(std::span<const int>(digits.data(), 0));
      return;
    }
    for (;;) {
      visit(std::span<const int>(digits));
      int pos = n_ - 1;
      while (pos >= 0 && digits[static_cast<std::size_t>(pos)] == alphabet_) {
        digits[static_cast<std::size_t>(pos)] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++digits[static_cast<std::size_t>(pos)];
    }
  }

  std::vector<DiscreteState> collect() const {
    std::vector<DiscreteState> out;
    out.reserve(static_cast<std::size_t>(count_));
    for_each([&out](std::span<const int> digits) {
      out.push_back(DiscreteState{{digits.begin(), digits.end()}});
    });
    return out;
  }

  // Index of a state in enumeration order (first entry most significant).
  std::uint64_t index_of(std::span<const int> digits) const {
    std::uint64_t idx = 0;
    for (int d : digits)
      idx = idx * static_cast<std::uint64_t>(alphabet_) +
            static_cast<std::uint64_t>(d - 1);
    return idx;
  }

  std::vector<int> state_at(std::uint64_t index) const {
    std::vector<int> digits(static_cast<std::size_t>(n_));
    for (int pos = n_ - 1; pos >= 0; --pos) {
      digits[static_cast<std::size_t>(pos)] =
          static_cast<int>(index % static_cast<std::uint64_t>(alphabet_)) + 1;
      index /= static_cast<std::uint64_t>(alphabet_);
    }
    return digits;
  }

private:
  int n_;
  int alphabet_;
  std::uint64_t count_ = 0;
};

}  // namespace aoi
