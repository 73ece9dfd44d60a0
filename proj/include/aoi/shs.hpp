#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <nlohmann/json.hpp>

#include "aoi/model.hpp"
#include "aoi/numeric.hpp"

namespace aoi {

// Monitor-age component of a transition's reset map. The served type-1
// device's own age component is always zeroed in addition; a type-2 delivery
// touches no device component (its age is identically zero and not tracked).
enum class ResetKind { to_zero, to_source_age, unchanged };

inline const char* reset_kind_name(ResetKind k) {
  switch (k) {
    case ResetKind::to_zero: return "to_zero";
    case ResetKind::to_source_age: return "to_source_age";
    case ResetKind::unchanged: return "unchanged";
  }
  return "?";
}

// One delivery event: the destination state is the source state shifted
// right with the serving device as the new first entry, and the rate is that
// device's unified rate.
struct Transition {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double rate = 0.0;
  bool refresh = false;       // does the monitor age drop on this delivery
  ResetKind reset_kind = ResetKind::unchanged;
};

// Explicit finite Markov model of the age process. States are the length-N
// source-index tuples in lexicographic order (see StateSpace); every state
// has exactly `alphabet` outgoing transitions (self-transitions included)
// and the same total outgoing rate. The drift of every age component is
// identically 1 in every state.
struct ShsModel {
  Variant variant = Variant::basic;
  int n = 0;
  int alphabet = 0;
  std::vector<double> rates;  // unified rate per device index, size alphabet
  double total_rate = 0.0;
  std::uint64_t state_count = 0;
  std::vector<Transition> transitions;

  std::vector<int> state_at(std::uint64_t index) const {
    std::vector<int> digits(static_cast<std::size_t>(n));
    for (int pos = n - 1; pos >= 0; --pos) {
      digits[static_cast<std::size_t>(pos)] =
          static_cast<int>(index % static_cast<std::uint64_t>(alphabet)) + 1;
      index /= static_cast<std::uint64_t>(alphabet);
    }
    return digits;
  }
};

namespace detail {

// Index of [j, q(1), ..., q(N-1)] given the index of q.
inline std::uint64_t shifted_index(std::uint64_t src, int new_first,
                                   std::uint64_t alphabet,
                                   std::uint64_t msd_weight) {
  return static_cast<std::uint64_t>(new_first - 1) * msd_weight +
         src / alphabet;
}

}  // namespace detail

// Builds the basic-system model: N^N states, N outgoing transitions per
// state with rate mu_j. The monitor refreshes exactly when the new update's
// source equals the source state's entry at position p(q')-1, in which case
// the monitor age resets to the serving device's age.
inline ShsModel build_basic_model(const SystemConfig& config,
                                  std::uint64_t cap = kDefaultStateCap) {
  config.validate();
  if (config.m_type2 != 0)
    throw ValidationError("build_basic_model requires m_type2 == 0");
  StateSpace space(config.n_type1, Variant::basic, cap);

  ShsModel model;
  model.variant = Variant::basic;
  model.n = config.n_type1;
  model.alphabet = space.alphabet();
  model.rates = config.mu;
  model.total_rate = config.mu_total();
  model.state_count = space.size();
  model.transitions.reserve(model.state_count *
                            static_cast<std::uint64_t>(model.alphabet));

  const std::uint64_t a = static_cast<std::uint64_t>(model.alphabet);
  std::uint64_t msd = 1;
  for (int i = 0; i < model.n - 1; ++i) msd *= a;

  std::uint64_t src = 0;
  std::vector<int> dst(static_cast<std::size_t>(model.n));
  space.for_each([&](std::span<const int> q) {
    for (int j = 1; j <= model.alphabet; ++j) {
      dst[0] = j;
      for (int i = 1; i < model.n; ++i)
        dst[static_cast<std::size_t>(i)] = q[static_cast<std::size_t>(i - 1)];
      const int p = p_index(dst);
      const bool refresh = (j == q[static_cast<std::size_t>(p - 2)]);
      model.transitions.push_back(
          {static_cast<std::uint32_t>(src),
           static_cast<std::uint32_t>(detail::shifted_index(src, j, a, msd)),
           model.rates[static_cast<std::size_t>(j - 1)], refresh,
           refresh ? ResetKind::to_source_age : ResetKind::unchanged});
    }
    ++src;
  });
  return model;
}

// Builds the hybrid-system model: (N+1)^N states over the alphabet extended
// with the aggregated type-2 device N+1. Monitor reset per destination
// state: a type-2 delivery always refreshes to zero; a type-1 delivery with
// an intervening type-2 update (p~ < p) never refreshes; otherwise the
// basic-system repeat rule applies.
inline ShsModel build_hybrid_model(const SystemConfig& config,
                                   std::uint64_t cap = kDefaultStateCap) {
  config.validate();
  StateSpace space(config.n_type1, Variant::hybrid, cap);

  ShsModel model;
  model.variant = Variant::hybrid;
  model.n = config.n_type1;
  model.alphabet = space.alphabet();
  model.rates = UnifiedRate::from_config(config, Variant::hybrid).rates;
  model.total_rate = config.mu_total() + config.lambda_total();
  model.state_count = space.size();
  model.transitions.reserve(model.state_count *
                            static_cast<std::uint64_t>(model.alphabet));

  const std::uint64_t a = static_cast<std::uint64_t>(model.alphabet);
  std::uint64_t msd = 1;
  for (int i = 0; i < model.n - 1; ++i) msd *= a;
  const int type2 = model.n + 1;

  std::uint64_t src = 0;
  std::vector<int> dst(static_cast<std::size_t>(model.n));
  space.for_each([&](std::span<const int> q) {
    for (int j = 1; j <= model.alphabet; ++j) {
      bool refresh;
      ResetKind kind;
      if (model.n == 0 || j == type2) {
        refresh = true;
        kind = ResetKind::to_zero;
      } else {
        dst[0] = j;
        for (int i = 1; i < model.n; ++i)
          dst[static_cast<std::size_t>(i)] =
              q[static_cast<std::size_t>(i - 1)];
        const int p = p_index(dst);
        const int pt = p_tilde_index(dst);
        if (pt > 1 && pt < p) {
          refresh = false;
          kind = ResetKind::unchanged;
        } else {
          refresh = (j == q[static_cast<std::size_t>(p - 2)]);
          kind = refresh ? ResetKind::to_source_age : ResetKind::unchanged;
        }
      }
      model.transitions.push_back(
          {static_cast<std::uint32_t>(src),
           static_cast<std::uint32_t>(detail::shifted_index(src, j, a, msd)),
           model.rates[static_cast<std::size_t>(j - 1)], refresh, kind});
    }
    ++src;
  });
  return model;
}

inline ShsModel build_model(const SystemConfig& config,
                            std::uint64_t cap = kDefaultStateCap) {
  return config.variant() == Variant::basic ? build_basic_model(config, cap)
                                            : build_hybrid_model(config, cap);
}

struct ShsSolution {
  Eigen::VectorXd pi;   // stationary probability per state
  Eigen::MatrixXd v;    // correlation components, column i = v_{q,i};
                        // column 0 is the monitor age. Columns of devices
                        // with zero rate are NaN (their age diverges).
  double aoi = 0.0;     // sum of column 0
};

namespace detail {

constexpr Eigen::Index kDenseCutoff = 256;

// Dense direct solve of (R*I - C) v = b for small systems.
inline Eigen::VectorXd solve_resolvent_dense(
    const std::vector<Eigen::Triplet<double>>& coupling, double total_rate,
    Eigen::Index dim, const Eigen::VectorXd& rhs, const char* what) {
  Eigen::MatrixXd a =
      Eigen::MatrixXd::Identity(dim, dim) * total_rate;
  for (const auto& t : coupling) a(t.row(), t.col()) -= t.value();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd v = lu.solve(rhs);
  if (!v.allFinite())
    throw NumericalError(std::string(what) + ": linear system is singular");
  return v;
}

// Fixed-point solve of v = (b + C v) / R for large systems. C is the
// component-preserving part of the incoming-rate operator, so C/R is
// substochastic with spectral radius strictly below 1 whenever every
// backward path eventually crosses a resetting transition; the Neumann
// series then converges geometrically and monotonically from v = 0.
inline Eigen::VectorXd solve_resolvent_iterative(
    const std::vector<Eigen::Triplet<double>>& coupling, double total_rate,
    Eigen::Index dim, const Eigen::VectorXd& rhs, const char* what) {
  Eigen::SparseMatrix<double> c(dim, dim);
  c.setFromTriplets(coupling.begin(), coupling.end());
  c.makeCompressed();
  Eigen::VectorXd v = rhs / total_rate;
  Eigen::VectorXd next(dim);
  constexpr int kMaxIters = 500000;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    next = (rhs + c * v) / total_rate;
    const double change = (next - v).cwiseAbs().maxCoeff();
    v.swap(next);
    if (change <= 1e-16 * std::max(1e-300, v.cwiseAbs().maxCoeff()) ||
        change == 0.0)
      return v;
  }
  throw NumericalError(std::string(what) +
                       ": fixed-point iteration did not converge (chain not "
                       "irreducible on its positive-rate support?)");
}

inline Eigen::VectorXd solve_resolvent(
    const std::vector<Eigen::Triplet<double>>& coupling, double total_rate,
    Eigen::Index dim, const Eigen::VectorXd& rhs, const char* what) {
  if (dim <= kDenseCutoff)
    return solve_resolvent_dense(coupling, total_rate, dim, rhs, what);
  return solve_resolvent_iterative(coupling, total_rate, dim, rhs, what);
}

}  // namespace detail

// Stationary distribution of the balance equations plus normalization.
// Small models go through a dense direct solve of the full system; large
// ones use power iteration on the uniformized jump chain (total outgoing
// rate is the same in every state, so one jump-chain step is one matvec).
// States only reachable through zero-rate devices come out at probability 0.
inline Eigen::VectorXd solve_steady_state(const ShsModel& model) {
  const auto dim = static_cast<Eigen::Index>(model.state_count);
  if (!(model.total_rate > 0.0))
    throw ValidationError("total rate must be positive");

  if (dim <= detail::kDenseCutoff) {
    // balance rows with the last row replaced by sum(pi) = 1
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    const Eigen::Index norm_row = dim - 1;
    for (const auto& t : model.transitions) {
      if (t.rate == 0.0) continue;
      if (static_cast<Eigen::Index>(t.to) != norm_row)
        a(static_cast<Eigen::Index>(t.to),
          static_cast<Eigen::Index>(t.from)) += t.rate;
      if (static_cast<Eigen::Index>(t.from) != norm_row)
        a(static_cast<Eigen::Index>(t.from),
          static_cast<Eigen::Index>(t.from)) -= t.rate;
    }
    a.row(norm_row).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    rhs[norm_row] = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
      throw NumericalError(
          "solve_steady_state: balance system is singular (chain not "
          "irreducible on its positive-rate support?)");
    return lu.solve(rhs);
  }

  std::vector<Eigen::Triplet<double>> incoming;
  incoming.reserve(model.transitions.size());
  for (const auto& t : model.transitions) {
    if (t.rate == 0.0) continue;
    incoming.emplace_back(static_cast<Eigen::Index>(t.to),
                          static_cast<Eigen::Index>(t.from), t.rate);
  }
  Eigen::SparseMatrix<double> a(dim, dim);
  a.setFromTriplets(incoming.begin(), incoming.end());
  a.makeCompressed();

  Eigen::VectorXd pi =
      Eigen::VectorXd::Constant(dim, 1.0 / static_cast<double>(dim));
  Eigen::VectorXd next(dim);
  constexpr int kMaxIters = 100000;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    next = (a * pi) / model.total_rate;
    const double change = (next - pi).cwiseAbs().maxCoeff();
    pi.swap(next);
    if (change == 0.0 || change <= 1e-18) {
      pi /= pi.sum();
      return pi;
    }
  }
  throw NumericalError(
      "solve_steady_state: power iteration did not converge (chain not "
      "irreducible on its positive-rate support?)");
}

// Solves the stationary correlation equations
//   v_q * R = pi_q + sum_{incoming l} rate_l * (v_{q_l} A_l)
// for all components. Components i >= 1 only couple within themselves (an
// incoming delivery either preserves v_i or zeroes it), so they are solved
// first, one sparse system each; the monitor component then takes the
// to_source_age couplings as a known right-hand side. Self-transitions are
// kept on both sides: their rate is part of R and their reset contributes
// on the right.
inline ShsSolution solve_correlation(const ShsModel& model,
                                     const Eigen::VectorXd& pi) {
  const auto dim = static_cast<Eigen::Index>(model.state_count);
  if (pi.size() != dim)
    throw ValidationError("solve_correlation: pi size mismatch");
  const double total = model.total_rate;
  if (!(total > 0.0)) throw ValidationError("total rate must be positive");

  ShsSolution sol;
  sol.pi = pi;
  sol.v.resize(dim, model.n + 1);

  // serving device of every state = its first (most significant) digit
  std::uint64_t msd = 1;
  for (int i = 0; i < model.n - 1; ++i)
    msd *= static_cast<std::uint64_t>(model.alphabet);
  auto serving = [&](std::uint32_t state) {
    return model.n == 0
               ? model.alphabet
               : static_cast<int>(static_cast<std::uint64_t>(state) / msd) + 1;
  };

  std::vector<Eigen::Triplet<double>> coupling;
  for (int comp = 1; comp <= model.n; ++comp) {
    if (model.rates[static_cast<std::size_t>(comp - 1)] == 0.0) {
      // A device that never delivers has a diverging age process; its
      // correlation column is undefined and never feeds the monitor column
      // (those couplings carry the device's zero rate).
      sol.v.col(comp).setConstant(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    coupling.clear();
    for (const auto& t : model.transitions) {
      if (t.rate == 0.0) continue;
      // The delivery zeroes exactly the serving device's component; a
      // type-2 delivery (serving index N+1) preserves every tracked one.
      if (serving(t.to) != comp)
        coupling.emplace_back(static_cast<Eigen::Index>(t.to),
                              static_cast<Eigen::Index>(t.from), t.rate);
    }
    sol.v.col(comp) =
        detail::solve_resolvent(coupling, total, dim, pi, "solve_correlation");
  }

  // monitor component: to_source_age couplings are known after the device
  // components, so they move to the right-hand side
  Eigen::VectorXd rhs = pi;
  coupling.clear();
  for (const auto& t : model.transitions) {
    if (t.rate == 0.0) continue;
    switch (t.reset_kind) {
      case ResetKind::unchanged:
        coupling.emplace_back(static_cast<Eigen::Index>(t.to),
                              static_cast<Eigen::Index>(t.from), t.rate);
        break;
      case ResetKind::to_source_age:
        rhs[static_cast<Eigen::Index>(t.to)] +=
            t.rate * sol.v(static_cast<Eigen::Index>(t.from), serving(t.to));
        break;
      case ResetKind::to_zero:
        break;
    }
  }
  sol.v.col(0) =
      detail::solve_resolvent(coupling, total, dim, rhs, "solve_correlation");
  sol.aoi = sol.v.col(0).sum();
  return sol;
}

inline ShsSolution solve(const ShsModel& model) {
  return solve_correlation(model, solve_steady_state(model));
}

// Per-state comparison of the generic solver output against the product-form
// closed expressions: pi_q = W(q)/R^N, v_q0 = min{p,p~} W(q)/R^(N+1) and
// v_qi = p_i(q) W(q)/R^(N+1) for devices i present in q, where W is the
// state weight and R the total rate. Deviations are reported; nothing is
// enforced here.
struct ClosedFormReport {
  double max_abs_pi = 0.0;
  double max_rel_pi = 0.0;
  double max_abs_v = 0.0;
  double max_rel_v = 0.0;

  double max_rel() const { return std::max(max_rel_pi, max_rel_v); }
  double max_abs() const { return std::max(max_abs_pi, max_abs_v); }
};

inline ClosedFormReport closed_form_check(const ShsModel& model,
                                          const ShsSolution& sol) {
  ClosedFormReport rep;
  const double total = model.total_rate;
  const double denom_pi = std::pow(total, model.n);
  const double denom_v = std::pow(total, model.n + 1);
  auto track = [](double got, double want, double& max_abs, double& max_rel) {
    const double abs = std::abs(got - want);
    max_abs = std::max(max_abs, abs);
    if (std::abs(want) > 1e-300) max_rel = std::max(max_rel, abs / std::abs(want));
  };

  UnifiedRate u;
  u.rates = model.rates;
  for (std::uint64_t idx = 0; idx < model.state_count; ++idx) {
    const std::vector<int> q = model.state_at(idx);
    const double w = state_weight(q, u);
    const auto row = static_cast<Eigen::Index>(idx);
    track(sol.pi[row], w / denom_pi, rep.max_abs_pi, rep.max_rel_pi);

    const int p = p_index(q);
    const int mp = model.variant == Variant::hybrid
                       ? std::min(p, p_tilde_index(q))
                       : p;
    track(sol.v(row, 0), mp * w / denom_v, rep.max_abs_v, rep.max_rel_v);
    for (int device = 1; device <= model.n; ++device) {
      if (model.rates[static_cast<std::size_t>(device - 1)] == 0.0) continue;
      bool present = false;
      for (int s : q)
        if (s == device) { present = true; break; }
      if (!present) continue;
      track(sol.v(row, device), p_device_index(q, device) * w / denom_v,
            rep.max_abs_v, rep.max_rel_v);
    }
  }
  return rep;
}

// Model dump for golden-file tests and debugging.
inline nlohmann::json model_to_json(const ShsModel& model) {
  nlohmann::json states = nlohmann::json::array();
  for (std::uint64_t idx = 0; idx < model.state_count; ++idx)
    states.push_back(model.state_at(idx));
  nlohmann::json transitions = nlohmann::json::array();
  for (const auto& t : model.transitions)
    transitions.push_back({{"from", t.from},
                           {"to", t.to},
                           {"rate", t.rate},
                           {"refresh", t.refresh},
                           {"reset_kind", reset_kind_name(t.reset_kind)}});
  return nlohmann::json{
      {"variant", model.variant == Variant::basic ? "basic" : "hybrid"},
      {"n", model.n},
      {"alphabet", model.alphabet},
      {"rates", model.rates},
      {"total_rate", model.total_rate},
      {"drift", "unit rate for every age component in every state"},
      {"states", states},
      {"transitions", transitions}};
}

}  // namespace aoi
