#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "aoi/analytic.hpp"
#include "aoi/sim.hpp"

using namespace aoi;
using Catch::Approx;

TEST_CASE("sawtooth time average on hand-built logs", "[sim]") {
  CHECK(aoi_time_average(std::vector<AdoptionEvent>{{0.0, 0.0}}, 10.0) ==
        Approx(5.0).epsilon(1e-15));
  CHECK(aoi_time_average(std::vector<AdoptionEvent>{{0.0, 0.0}, {1.0, 0.0}},
                         2.0) == Approx(0.5).epsilon(1e-15));
  // segments: ramp 0->2 over 2 units, then 1->3 over 2 units: (2 + 4)/4
  CHECK(aoi_time_average(std::vector<AdoptionEvent>{{0.0, 0.0}, {2.0, 1.0}},
                         4.0) == Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(
      aoi_time_average(std::vector<AdoptionEvent>{{1.0, 0.0}, {0.5, 0.0}},
                       2.0),
      ValidationError);
  CHECK_THROWS_AS(aoi_time_average(std::vector<AdoptionEvent>{}, 2.0),
                  ValidationError);
}

TEST_CASE("simulation matches the closed forms", "[sim]") {
  SimConfig sim;
  sim.horizon = 2e5;
  sim.replications = 5;
  sim.seed = 42;
  const struct {
    int n;
    double lambda;
    double want;
  } cases[] = {{1, 0.0, 2.0}, {2, 0.0, 1.25}, {1, 1.0, 0.75}};
  for (const auto& c : cases) {
    const SystemConfig cfg =
        SystemConfig::homogeneous(c.n, 1.0, c.lambda > 0 ? 1 : 0, c.lambda);
    const SimResult r = simulate_hybrid(cfg, sim);
    CHECK(r.mean_aoi == Approx(c.want).epsilon(0.03));
  }
}

TEST_CASE("heterogeneous and degenerate systems match the closed forms",
          "[sim]") {
  SimConfig sim;
  sim.horizon = 2e5;
  sim.replications = 5;
  sim.seed = 1717;
  {
    const SystemConfig c{2, {0.5, 2.0}, 1, {0.7}};
    CHECK(simulate_hybrid(c, sim).mean_aoi ==
          Approx(aoi_hybrid_exact(c).value).epsilon(0.03));
  }
  {
    // a zero-rate device never delivers but must not disturb anything
    const SystemConfig c{2, {0.0, 1.0}, 1, {0.5}};
    CHECK(simulate_hybrid(c, sim).mean_aoi ==
          Approx(aoi_hybrid_exact(c).value).epsilon(0.03));
  }
  {
    // feeders only: backward recurrence time of a Poisson process
    const SystemConfig c{0, {}, 1, {2.0}};
    CHECK(simulate_hybrid(c, sim).mean_aoi == Approx(0.5).epsilon(0.03));
  }
}

TEST_CASE("identical seeds give bit-identical results", "[sim]") {
  const SystemConfig cfg = SystemConfig::homogeneous(2, 1.0, 1, 1.0);
  SimConfig sim;
  sim.horizon = 5e4;
  sim.replications = 4;
  sim.seed = 9001;
  const SimResult a = simulate_hybrid(cfg, sim);
  const SimResult b = simulate_hybrid(cfg, sim);
  CHECK(a.mean_aoi == b.mean_aoi);
  CHECK(a.half_width_95 == b.half_width_95);
  CHECK(a.per_replication == b.per_replication);
  CHECK(a.events_processed == b.events_processed);

  sim.seed = 9002;
  CHECK(simulate_hybrid(cfg, sim).mean_aoi != a.mean_aoi);
}

TEST_CASE("monitor age never refreshes upward", "[sim]") {
  const SystemConfig cfg = SystemConfig::homogeneous(3, 1.0, 1, 2.0);
  SimConfig sim;
  sim.horizon = 5e3;
  sim.replications = 1;
  sim.seed = 5;
  Trace trace;
  simulate_hybrid(cfg, sim, &trace);
  REQUIRE(trace.size() > 1000);
  double prev_t = 0.0, prev_age = 0.0;
  for (const TraceRow& row : trace) {
    const double age_before = prev_age + (row.time - prev_t);
    CHECK(row.monitor_age_after <= age_before + 1e-12);
    if (row.kind == SimEventKind::delivery_type2)
      CHECK(row.monitor_age_after == 0.0);
    prev_t = row.time;
    prev_age = row.monitor_age_after;
  }
}

TEST_CASE("online integral equals the replayed sawtooth", "[sim]") {
  const SystemConfig cfg = SystemConfig::homogeneous(2, 1.0, 1, 1.0);
  SimConfig sim;
  sim.horizon = 2e3;
  sim.replications = 1;
  sim.warmup_fraction = 0.0;
  sim.seed = 31;
  Trace trace;
  const SimResult r = simulate_hybrid(cfg, sim, &trace);
  std::vector<AdoptionEvent> events{{0.0, 0.0}};
  for (const TraceRow& row : trace)
    events.push_back({row.time, row.monitor_age_after});
  CHECK(aoi_time_average(events, sim.horizon) ==
        Approx(r.mean_aoi).epsilon(1e-9));
}

TEST_CASE("delivered ages of a zero-wait device are Exp(mu)", "[sim]") {
  // Kolmogorov-Smirnov at alpha = 0.01 on 1e5 delivery ages
  const double mu = 1.7;
  const SystemConfig cfg = SystemConfig::homogeneous(1, mu);
  SimConfig sim;
  sim.horizon = 1.05e5 / mu;
  sim.replications = 1;
  sim.seed = 2024;
  Trace trace;
  simulate_hybrid(cfg, sim, &trace);
  std::vector<double> ages;
  for (const TraceRow& row : trace)
    if (row.kind == SimEventKind::delivery_type1 && row.device == 1)
      ages.push_back(row.delivered_age);
  REQUIRE(ages.size() >= 100000);
  ages.resize(100000);
  std::sort(ages.begin(), ages.end());
  double d_max = 0.0;
  const double n = static_cast<double>(ages.size());
  for (std::size_t i = 0; i < ages.size(); ++i) {
    const double cdf = 1.0 - std::exp(-mu * ages[i]);
    d_max = std::max(d_max, std::abs(cdf - (i + 1) / n));
    d_max = std::max(d_max, std::abs(cdf - i / n));
  }
  CHECK(d_max < 1.62762 / std::sqrt(n));
}

TEST_CASE("estimator covers the analytic value across seeds", "[sim]") {
  for (int n : {1, 2, 3}) {
    for (double lambda : {0.0, 1.0}) {
      const SystemConfig cfg =
          SystemConfig::homogeneous(n, 1.0, lambda > 0 ? 1 : 0, lambda);
      const double want = aoi_hybrid_exact(cfg).value;
      int covered = 0;
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SimConfig sim;
        sim.horizon = 2e4;
        sim.replications = 5;
        sim.seed = seed;
        const SimResult r = simulate_hybrid(cfg, sim);
        if (std::abs(r.mean_aoi - want) <= 3.0 * r.half_width_95) ++covered;
      }
      CHECK(covered >= 19);
    }
  }
}

TEST_CASE("baseline simulations match classical formulas", "[sim]") {
  SimConfig sim;
  sim.horizon = 5e5;
  sim.replications = 5;
  sim.seed = 77;
  {
    const BaselineDescriptor d{BaselineKind::fcfs_mmn, 1, 1.0, 0.53};
    const SimResult r = simulate_baseline(d, sim);
    CHECK(r.mean_aoi ==
          Approx(reference::mm1_fcfs_aoi(1.0, 0.53)).epsilon(0.02));
  }
  {
    const BaselineDescriptor d{BaselineKind::lcfs_nqueue_preempt, 1, 1.0, 1.0};
    const SimResult r = simulate_baseline(d, sim);
    CHECK(r.mean_aoi ==
          Approx(reference::lcfs_preemptive_mm1_aoi(1.0, 1.0)).epsilon(0.02));
  }
  {
    // preemptive M/M/1 age decreases with the offered load
    double prev = 1e300;
    for (double rho : {0.5, 1.0, 2.0}) {
      const BaselineDescriptor d{BaselineKind::lcfs_mmn_preempt, 1, 1.0, rho};
      const SimResult r = simulate_baseline(d, sim);
      CHECK(r.mean_aoi < prev);
      CHECK(r.mean_aoi ==
            Approx(reference::lcfs_preemptive_mm1_aoi(rho, 1.0)).epsilon(0.02));
      prev = r.mean_aoi;
    }
  }
}

TEST_CASE("unstable fcfs load is rejected", "[sim]") {
  const BaselineDescriptor d{BaselineKind::fcfs_mmn, 2, 1.0, 1.0};
  SimConfig sim;
  CHECK_THROWS_AS(simulate_baseline(d, sim), ValidationError);
}

TEST_CASE("sim config validation", "[sim]") {
  SimConfig sim;
  sim.horizon = -1;
  CHECK_THROWS_AS(sim.validate(), ValidationError);
  sim = SimConfig{};
  sim.warmup_fraction = 1.0;
  CHECK_THROWS_AS(sim.validate(), ValidationError);
  sim = SimConfig{};
  sim.replications = 0;
  CHECK_THROWS_AS(sim.validate(), ValidationError);
  CHECK_THROWS_AS(
      simulate_hybrid(SystemConfig{1, {0.0}, 1, {0.0}}, SimConfig{}),
      ValidationError);
}

TEST_CASE("trace csv has the documented header", "[sim]") {
  Trace t{{1.5, SimEventKind::delivery_type1, 2, 0.25, 0.25}};
  const std::string csv = trace_to_csv(t);
  CHECK(csv.rfind("time,event_kind,device,delivered_age,monitor_age_after\n",
                  0) == 0);
  CHECK(csv.find("delivery_type1") != std::string::npos);
}
