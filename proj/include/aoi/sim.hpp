#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <future>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/numeric.hpp"
#include "aoi/rng.hpp"

namespace aoi {

struct SimConfig {
  double horizon = 1e6;          // simulated time units per replication
  double warmup_fraction = 0.1;  // leading fraction excluded from the average
  int replications = 10;
  std::uint64_t seed = 1;
  std::uint64_t max_events_per_replication = 200'000'000;  // runaway guard

  void validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
      throw ValidationError("horizon must be positive and finite");
    if (!(warmup_fraction >= 0.0) || warmup_fraction >= 1.0)
      throw ValidationError("warmup_fraction must be in [0, 1)");
    if (replications < 1) throw ValidationError("replications must be >= 1");
  }
};

struct SimResult {
  double mean_aoi = 0.0;
  double half_width_95 = 0.0;  // normal-approximation CI over replications
  std::vector<double> per_replication;
  std::uint64_t events_processed = 0;
};

enum class SimEventKind { delivery_type1, delivery_type2, arrival, discard };

inline const char* sim_event_kind_name(SimEventKind k) {
  switch (k) {
    case SimEventKind::delivery_type1: return "delivery_type1";
    case SimEventKind::delivery_type2: return "delivery_type2";
    case SimEventKind::arrival: return "arrival";
    case SimEventKind::discard: return "discard";
  }
  return "?";
}

struct TraceRow {
  double time = 0.0;
  SimEventKind kind = SimEventKind::delivery_type1;
  int device = 0;
  double delivered_age = 0.0;
  double monitor_age_after = 0.0;
};

using Trace = std::vector<TraceRow>;

struct AdoptionEvent {
  double time = 0.0;
  double new_age = 0.0;
};

// Exact integral of the age sawtooth over [events.front().time, horizon]
// divided by that span. Between events the age grows at unit rate, so a
// segment of length dt starting at age a contributes a*dt + dt^2/2.
inline double aoi_time_average(std::span<const AdoptionEvent> events,
                               double horizon) {
  if (events.empty())
    throw ValidationError("aoi_time_average: no events");
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i].time < events[i - 1].time)
      throw ValidationError("aoi_time_average: events out of order");
  if (horizon < events.back().time)
    throw ValidationError("aoi_time_average: horizon before last event");

  KahanSum integral;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double t1 =
        i + 1 < events.size() ? events[i + 1].time : horizon;
    const double dt = t1 - events[i].time;
    integral.add(events[i].new_age * dt + 0.5 * dt * dt);
  }
  const double span = horizon - events.front().time;
  if (!(span > 0.0))
    throw ValidationError("aoi_time_average: empty time span");
  return integral.value() / span;
}

namespace detail {

// Age accumulator over [warmup, horizon] with exact partial segments.
class AgeIntegral {
public:
  AgeIntegral(double warmup, double horizon)
      : warmup_(warmup), horizon_(horizon) {}

  void segment(double t0, double t1, double age0) {
    const double lo = std::max(t0, warmup_);
    const double hi = std::min(t1, horizon_);
    if (lo >= hi) return;
    const double dt = hi - lo;
    sum_.add((age0 + (lo - t0)) * dt + 0.5 * dt * dt);
  }

  double average() const { return sum_.value() / (horizon_ - warmup_); }

private:
  double warmup_, horizon_;
  KahanSum sum_;
};

template <typename RunReplication>
SimResult run_replications(const SimConfig& sim, RunReplication&& run,
                           bool parallel_ok) {
  sim.validate();
  const int reps = sim.replications;
  std::vector<double> values(static_cast<std::size_t>(reps));
  std::vector<std::uint64_t> events(static_cast<std::size_t>(reps));

  if (parallel_ok && reps > 1) {
    std::vector<std::future<std::pair<double, std::uint64_t>>> futures;
    futures.reserve(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r)
      futures.push_back(std::async(std::launch::async,
                                   [&run, r] { return run(r); }));
    for (int r = 0; r < reps; ++r) {
      auto [v, e] = futures[static_cast<std::size_t>(r)].get();
      values[static_cast<std::size_t>(r)] = v;
      events[static_cast<std::size_t>(r)] = e;
    }
  } else {
    for (int r = 0; r < reps; ++r) {
      auto [v, e] = run(r);
      values[static_cast<std::size_t>(r)] = v;
      events[static_cast<std::size_t>(r)] = e;
    }
  }

  SimResult out;
  out.per_replication = values;
  KahanSum mean_sum;
  for (double v : values) {
    if (!std::isfinite(v))
      throw NumericalError("simulation produced a non-finite estimate");
    mean_sum.add(v);
  }
  out.mean_aoi = mean_sum.value() / reps;
  if (reps > 1) {
    KahanSum var_sum;
    for (double v : values) {
      const double d = v - out.mean_aoi;
      var_sum.add(d * d);
    }
    const double sd = std::sqrt(var_sum.value() / (reps - 1));
    out.half_width_95 = 1.959963984540054 * sd / std::sqrt(double(reps));
  }
  for (std::uint64_t e : events) out.events_processed += e;
  return out;
}

}  // namespace detail

// Event-driven simulation of the zero-wait multi-sensor system, hybrid or
// basic (lambda = 0). Each type-1 device is a renewal process of Exp(mu_i)
// service times; under zero-wait sampling an update is generated the moment
// the previous one completes, so its age at delivery equals its service
// time. The aggregated type-2 stream is Poisson(lambda) and resets the
// monitor to age zero. A delivery is adopted only when strictly fresher
// than the monitor. Simultaneous timestamps (possible only through
// floating-point collisions) are processed in device-index order, type-1
// before the type-2 aggregate.
//
// If `trace` is non-null the replications run sequentially and the trace of
// replication 0 is captured.
inline SimResult simulate_hybrid(const SystemConfig& config,
                                 const SimConfig& sim,
                                 Trace* trace = nullptr) {
  config.validate();
  sim.validate();
  const int n = config.n_type1;
  const double lambda = config.lambda_total();
  if (config.mu_total() + lambda <= 0.0)
    throw ValidationError("total rate must be positive");

  auto run = [&](int rep) -> std::pair<double, std::uint64_t> {
    std::vector<SplitMix64> dev_rng;
    dev_rng.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 1; i <= n; ++i)
      dev_rng.push_back(make_stream(sim.seed, static_cast<std::uint64_t>(rep),
                                    static_cast<std::uint64_t>(i)));
    dev_rng.push_back(make_stream(sim.seed, static_cast<std::uint64_t>(rep),
                                  static_cast<std::uint64_t>(n) + 1));

    std::vector<double> gen(static_cast<std::size_t>(n), 0.0);
    std::vector<double> next(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      next[static_cast<std::size_t>(i)] =
          dev_rng[static_cast<std::size_t>(i)].next_exponential(
              config.mu[static_cast<std::size_t>(i)]);
    double next2 =
        dev_rng[static_cast<std::size_t>(n)].next_exponential(lambda);

    detail::AgeIntegral integral(sim.warmup_fraction * sim.horizon,
                                 sim.horizon);
    double t_ref = 0.0, age_ref = 0.0;
    std::uint64_t processed = 0;
    const bool record = trace != nullptr && rep == 0;

    for (;;) {
      int device = -1;  // 0..n-1 type-1, n = type-2 aggregate
      double t = next2;
      for (int i = 0; i < n; ++i) {
        if (next[static_cast<std::size_t>(i)] < t) {
          t = next[static_cast<std::size_t>(i)];
          device = i;
        }
      }
      if (device < 0) device = n;
      if (t > sim.horizon || !std::isfinite(t)) break;
      if (++processed > sim.max_events_per_replication)
        throw NumericalError("simulate_hybrid: event budget exhausted");

      integral.segment(t_ref, t, age_ref);
      double age_now = age_ref + (t - t_ref);
      double delivered;
      if (device < n) {
        delivered = t - gen[static_cast<std::size_t>(device)];
        gen[static_cast<std::size_t>(device)] = t;
        next[static_cast<std::size_t>(device)] =
            t + dev_rng[static_cast<std::size_t>(device)].next_exponential(
                    config.mu[static_cast<std::size_t>(device)]);
      } else {
        delivered = 0.0;
        next2 = t + dev_rng[static_cast<std::size_t>(n)].next_exponential(
                        lambda);
      }
      if (!std::isfinite(delivered) || delivered < 0.0)
        throw NumericalError("simulate_hybrid: non-finite sample");
      if (delivered < age_now) age_now = delivered;  // strict adoption
      t_ref = t;
      age_ref = age_now;
      if (record)
        trace->push_back({t,
                          device < n ? SimEventKind::delivery_type1
                                     : SimEventKind::delivery_type2,
                          device < n ? device + 1 : n + 1, delivered,
                          age_now});
    }
    integral.segment(t_ref, sim.horizon, age_ref);
    return {integral.average(), processed};
  };

  return detail::run_replications(sim, run, trace == nullptr);
}

enum class BaselineKind { fcfs_mmn, lcfs_mmn_preempt, lcfs_nqueue_preempt };

inline const char* baseline_kind_name(BaselineKind k) {
  switch (k) {
    case BaselineKind::fcfs_mmn: return "fcfs_mmn";
    case BaselineKind::lcfs_mmn_preempt: return "lcfs_mmn_preempt";
    case BaselineKind::lcfs_nqueue_preempt: return "lcfs_nqueue_preempt";
  }
  return "?";
}

// Reference systems compared against in the evaluation sweeps. Updates are
// generated externally: fcfs_mmn is a shared FCFS queue in front of N
// exponential servers fed by one Poisson stream of rate rho*N*mu; the
// preemptive M/M/N variant has no queue and a new arrival displaces the
// oldest update in service when all servers are busy; the N-queue variant is
// N independent single-server preemptive last-come-first-served queues, each
// with its own Poisson arrivals of rate rho*mu. All deliveries go through
// the same strict-smaller adoption rule at the monitor.
struct BaselineDescriptor {
  BaselineKind kind = BaselineKind::fcfs_mmn;
  int n = 1;                      // servers (M/M/N) or queues (N-queue)
  double service_rate_each = 1.0;
  double rho = 0.5;

  void validate() const {
    if (n < 1) throw ValidationError("baseline needs n >= 1");
    if (!(service_rate_each > 0.0))
      throw ValidationError("service rate must be positive");
    if (!(rho > 0.0)) throw ValidationError("rho must be positive");
    if (kind == BaselineKind::fcfs_mmn && rho >= 1.0)
      throw ValidationError("fcfs_mmn is unstable at rho >= 1");
  }
};

inline SimResult simulate_baseline(const BaselineDescriptor& base,
                                   const SimConfig& sim,
                                   Trace* trace = nullptr) {
  base.validate();
  sim.validate();
  const int n = base.n;
  const double mu = base.service_rate_each;

  auto run_mmn = [&](int rep) -> std::pair<double, std::uint64_t> {
    const double arrival_rate = base.rho * n * mu;
    SplitMix64 arr_rng =
        make_stream(sim.seed, static_cast<std::uint64_t>(rep), 0);
    std::vector<SplitMix64> srv_rng;
    for (int s = 1; s <= n; ++s)
      srv_rng.push_back(make_stream(sim.seed, static_cast<std::uint64_t>(rep),
                                    static_cast<std::uint64_t>(s)));

    std::vector<bool> busy(static_cast<std::size_t>(n), false);
    std::vector<double> comp(static_cast<std::size_t>(n),
                             std::numeric_limits<double>::infinity());
    std::vector<double> gen(static_cast<std::size_t>(n), 0.0);
    std::deque<double> queue;  // generation times, FCFS only
    double next_arrival = arr_rng.next_exponential(arrival_rate);

    detail::AgeIntegral integral(sim.warmup_fraction * sim.horizon,
                                 sim.horizon);
    double t_ref = 0.0, age_ref = 0.0;
    std::uint64_t processed = 0;
    const bool record = trace != nullptr && rep == 0;

    for (;;) {
      // completions first at equal timestamps, by server index, then arrival
      int server = -1;
      double t = std::numeric_limits<double>::infinity();
      bool is_completion = false;
      for (int s = 0; s < n; ++s) {
        if (busy[static_cast<std::size_t>(s)] &&
            comp[static_cast<std::size_t>(s)] < t) {
          t = comp[static_cast<std::size_t>(s)];
          server = s;
          is_completion = true;
        }
      }
      if (next_arrival < t) {
        t = next_arrival;
        is_completion = false;
      }
      if (t > sim.horizon || !std::isfinite(t)) break;
      if (++processed > sim.max_events_per_replication)
        throw NumericalError("simulate_baseline: event budget exhausted");

      if (is_completion) {
        integral.segment(t_ref, t, age_ref);
        double age_now = age_ref + (t - t_ref);
        const double delivered = t - gen[static_cast<std::size_t>(server)];
        if (delivered < age_now) age_now = delivered;
        t_ref = t;
        age_ref = age_now;
        if (record)
          trace->push_back({t, SimEventKind::delivery_type1, server + 1,
                            delivered, age_now});
        if (base.kind == BaselineKind::fcfs_mmn && !queue.empty()) {
          gen[static_cast<std::size_t>(server)] = queue.front();
          queue.pop_front();
          comp[static_cast<std::size_t>(server)] =
              t + srv_rng[static_cast<std::size_t>(server)].next_exponential(
                      mu);
        } else {
          busy[static_cast<std::size_t>(server)] = false;
          comp[static_cast<std::size_t>(server)] =
              std::numeric_limits<double>::infinity();
        }
      } else {
        // arrival; generation time = arrival time
        int idle = -1;
        for (int s = 0; s < n; ++s)
          if (!busy[static_cast<std::size_t>(s)]) { idle = s; break; }
        if (idle >= 0) {
          busy[static_cast<std::size_t>(idle)] = true;
          gen[static_cast<std::size_t>(idle)] = t;
          comp[static_cast<std::size_t>(idle)] =
              t + srv_rng[static_cast<std::size_t>(idle)].next_exponential(mu);
        } else if (base.kind == BaselineKind::fcfs_mmn) {
          queue.push_back(t);
        } else {
          // preempt the oldest update in service
          int victim = 0;
          for (int s = 1; s < n; ++s)
            if (gen[static_cast<std::size_t>(s)] <
                gen[static_cast<std::size_t>(victim)])
              victim = s;
          gen[static_cast<std::size_t>(victim)] = t;
          comp[static_cast<std::size_t>(victim)] =
              t + srv_rng[static_cast<std::size_t>(victim)].next_exponential(
                      mu);
          if (record)
            trace->push_back(
                {t, SimEventKind::discard, victim + 1, 0.0,
                 age_ref + (t - t_ref)});
        }
        next_arrival = t + arr_rng.next_exponential(arrival_rate);
      }
    }
    integral.segment(t_ref, sim.horizon, age_ref);
    return {integral.average(), processed};
  };

  auto run_nqueue = [&](int rep) -> std::pair<double, std::uint64_t> {
    const double arrival_rate = base.rho * mu;
    std::vector<SplitMix64> arr_rng, srv_rng;
    for (int i = 1; i <= n; ++i) {
      arr_rng.push_back(make_stream(sim.seed, static_cast<std::uint64_t>(rep),
                                    static_cast<std::uint64_t>(i)));
      srv_rng.push_back(make_stream(sim.seed, static_cast<std::uint64_t>(rep),
                                    static_cast<std::uint64_t>(n + i)));
    }
    std::vector<bool> busy(static_cast<std::size_t>(n), false);
    std::vector<double> comp(static_cast<std::size_t>(n),
                             std::numeric_limits<double>::infinity());
    std::vector<double> gen(static_cast<std::size_t>(n), 0.0);
    std::vector<double> next_arrival(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      next_arrival[static_cast<std::size_t>(i)] =
          arr_rng[static_cast<std::size_t>(i)].next_exponential(arrival_rate);

    detail::AgeIntegral integral(sim.warmup_fraction * sim.horizon,
                                 sim.horizon);
    double t_ref = 0.0, age_ref = 0.0;
    std::uint64_t processed = 0;
    const bool record = trace != nullptr && rep == 0;

    for (;;) {
      // completions first at equal timestamps, then arrivals, by queue index
      int queue_idx = -1;
      bool is_completion = false;
      double t = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i)
        if (busy[static_cast<std::size_t>(i)] &&
            comp[static_cast<std::size_t>(i)] < t) {
          t = comp[static_cast<std::size_t>(i)];
          queue_idx = i;
          is_completion = true;
        }
      for (int i = 0; i < n; ++i)
        if (next_arrival[static_cast<std::size_t>(i)] < t) {
          t = next_arrival[static_cast<std::size_t>(i)];
          queue_idx = i;
          is_completion = false;
        }
      if (t > sim.horizon || !std::isfinite(t)) break;
      if (++processed > sim.max_events_per_replication)
        throw NumericalError("simulate_baseline: event budget exhausted");

      const auto qi = static_cast<std::size_t>(queue_idx);
      if (is_completion) {
        integral.segment(t_ref, t, age_ref);
        double age_now = age_ref + (t - t_ref);
        const double delivered = t - gen[qi];
        if (delivered < age_now) age_now = delivered;
        t_ref = t;
        age_ref = age_now;
        if (record)
          trace->push_back({t, SimEventKind::delivery_type1, queue_idx + 1,
                            delivered, age_now});
        busy[qi] = false;
        comp[qi] = std::numeric_limits<double>::infinity();
      } else {
        // arrival preempts whatever is in service
        gen[qi] = t;
        comp[qi] = t + srv_rng[qi].next_exponential(mu);
        busy[qi] = true;
        next_arrival[qi] = t + arr_rng[qi].next_exponential(arrival_rate);
      }
    }
    integral.segment(t_ref, sim.horizon, age_ref);
    return {integral.average(), processed};
  };

  if (base.kind == BaselineKind::lcfs_nqueue_preempt)
    return detail::run_replications(sim, run_nqueue, trace == nullptr);
  return detail::run_replications(sim, run_mmn, trace == nullptr);
}

// Classical single-server references used as independent checks.
namespace reference {

// FCFS M/M/1 average age at load rho and service rate mu.
inline double mm1_fcfs_aoi(double mu, double rho) {
  if (!(mu > 0.0) || !(rho > 0.0) || rho >= 1.0)
    throw ValidationError("mm1_fcfs_aoi needs mu > 0 and rho in (0,1)");
  return (1.0 / mu) * (1.0 + 1.0 / rho + rho * rho / (1.0 - rho));
}

// Preemptive LCFS M/M/1 average age.
inline double lcfs_preemptive_mm1_aoi(double lambda, double mu) {
  if (!(lambda > 0.0) || !(mu > 0.0))
    throw ValidationError("lcfs_preemptive_mm1_aoi needs positive rates");
  return 1.0 / lambda + 1.0 / mu;
}

}  // namespace reference

inline std::string trace_to_csv(const Trace& trace) {
  std::string out = "time,event_kind,device,delivered_age,monitor_age_after\n";
  char buf[160];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%d,%.17g,%.17g\n", row.time,
                  sim_event_kind_name(row.kind), row.device,
                  row.delivered_age, row.monitor_age_after);
    out += buf;
  }
  return out;
}

}  // namespace aoi
