// Command-line front end: closed-form, Markov-solver, and simulation-based
// average-age computations, parameter sweeps, deployment optimization, and
// reproduction of the reference ratio tables.
//
// Exit codes: 0 success, 1 validation/usage error, 2 numerical or check
// failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "aoi/analytic.hpp"
#include "aoi/config_io.hpp"
#include "aoi/model.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/shs.hpp"
#include "aoi/sim.hpp"
#include "aoi/table_data.hpp"

namespace {

using nlohmann::json;

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw aoi::ValidationError("cannot parse number: " + item);
    }
  }
  return out;
}

std::vector<std::int64_t> parse_ints(const std::string& csv) {
  std::vector<std::int64_t> out;
  for (double v : parse_doubles(csv)) out.push_back(static_cast<std::int64_t>(v));
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw aoi::ValidationError("cannot open output file: " + out_path);
  f << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ratio cells are quoted as two-decimal percentages
std::string fmt_percent(double fraction) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

// Shared system-config flags. A config file and inline flags are exclusive.
struct ConfigArgs {
  std::string config_path;
  int n = 0;
  std::string mu_csv;
  double mu_each = -1.0;
  int m = -1;
  std::string lambda_csv;
  double lambda_each = -1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--n", n, "number of type-1 devices");
    cmd->add_option("--mu", mu_csv, "comma-separated type-1 service rates");
    cmd->add_option("--mu-each", mu_each, "uniform type-1 service rate");
    cmd->add_option("--m", m, "number of type-2 devices");
    cmd->add_option("--lambda", lambda_csv,
                    "comma-separated type-2 arrival rates");
    cmd->add_option("--lambda-each", lambda_each,
                    "uniform type-2 arrival rate");
  }

  aoi::SystemConfig build() const {
    if (!config_path.empty()) return aoi::load_config(config_path);
    aoi::SystemConfig c;
    c.n_type1 = n;
    if (!mu_csv.empty())
      c.mu = parse_doubles(mu_csv);
    else if (mu_each >= 0.0)
      c.mu.assign(static_cast<std::size_t>(std::max(n, 0)), mu_each);
    if (!lambda_csv.empty()) {
      c.lambda_each = parse_doubles(lambda_csv);
      c.m_type2 = m >= 0 ? m : static_cast<int>(c.lambda_each.size());
    } else if (lambda_each >= 0.0) {
      if (m < 0)
        throw aoi::ValidationError("--lambda-each requires --m");
      c.m_type2 = m;
      c.lambda_each.assign(static_cast<std::size_t>(std::max(m, 0)),
                           lambda_each);
    } else {
      c.m_type2 = std::max(m, 0);
    }
    c.validate();
    return c;
  }
};

struct SimArgs {
  double horizon = 1e6;
  double warmup = 0.1;
  int reps = 10;
  std::uint64_t seed = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--horizon", horizon, "simulated time per replication");
    cmd->add_option("--warmup", warmup, "warmup fraction discarded");
    cmd->add_option("--reps", reps, "independent replications");
    cmd->add_option("--seed", seed, "base RNG seed");
  }

  aoi::SimConfig build() const {
    aoi::SimConfig s;
    s.horizon = horizon;
    s.warmup_fraction = warmup;
    s.replications = reps;
    s.seed = seed;
    s.validate();
    return s;
  }
};

json result_record(const aoi::SystemConfig& c, const char* method,
                   double value) {
  return json{{"config", aoi::config_to_json(c)},
              {"method", method},
              {"value", value}};
}

aoi::AoiResult run_analytic_method(const aoi::SystemConfig& c,
                                   const std::string& method) {
  const double mu = c.mu_total();
  const double lambda = c.lambda_total();
  const bool homogeneous_mu =
      c.mu.empty() ||
      std::all_of(c.mu.begin(), c.mu.end(),
                  [&](double r) { return r == c.mu.front(); });
  const auto states_basic = aoi::state_space_size(c.n_type1, aoi::Variant::basic);
  const auto states_hybrid =
      aoi::state_space_size(c.n_type1, aoi::Variant::hybrid);

  if (method == "theorem1") return aoi::aoi_basic_exact(c);
  if (method == "theorem2") return aoi::aoi_hybrid_exact(c);
  if (method == "corollary1") {
    if (!homogeneous_mu)
      throw aoi::ValidationError("corollary1 needs homogeneous rates");
    return aoi::aoi_basic_homogeneous(c.n_type1, mu);
  }
  if (method == "corollary2") {
    if (!homogeneous_mu)
      throw aoi::ValidationError("corollary2 needs homogeneous type-1 rates");
    return aoi::aoi_hybrid_homogeneous(c.n_type1, mu, lambda);
  }
  if (method == "remark1") {
    if (mu != 0.0)
      throw aoi::ValidationError("remark1 applies when every mu_i is 0");
    return aoi::aoi_type2_only(lambda);
  }
  if (method != "auto")
    throw aoi::ValidationError("unknown method: " + method);

  // auto: exact enumeration within the cap, homogeneous formulas beyond
  if (c.n_type1 == 0 || mu == 0.0) return aoi::aoi_type2_only(lambda);
  if (c.variant() == aoi::Variant::basic) {
    if (states_basic <= aoi::kDefaultStateCap) return aoi::aoi_basic_exact(c);
    if (homogeneous_mu) return aoi::aoi_basic_homogeneous(c.n_type1, mu);
    throw aoi::CapExceededError(
        "state space exceeds the enumeration cap and the rates are "
        "heterogeneous; no exact method applies (reduce N or make the rates "
        "uniform)");
  }
  if (states_hybrid <= aoi::kDefaultStateCap) return aoi::aoi_hybrid_exact(c);
  if (homogeneous_mu)
    return aoi::aoi_hybrid_homogeneous(c.n_type1, mu, lambda);
  throw aoi::CapExceededError(
      "state space exceeds the enumeration cap and the rates are "
      "heterogeneous; no exact method applies (reduce N or make the rates "
      "uniform)");
}

// ---------------------------------------------------------------- analytic
int cmd_analytic(const ConfigArgs& cfg, const std::string& method,
                 const std::string& format, const std::string& out) {
  const aoi::SystemConfig c = cfg.build();
  const aoi::AoiResult r = run_analytic_method(c, method);
  if (format == "json") {
    emit(result_record(c, aoi::method_name(r.method), r.value).dump(2) + "\n",
         out);
  } else {
    std::string csv = "method,value\n";
    csv += std::string(aoi::method_name(r.method)) + "," + fmt(r.value) + "\n";
    emit(csv, out);
  }
  return 0;
}

// --------------------------------------------------------------------- shs
int cmd_shs(const ConfigArgs& cfg, const std::string& dump_path, bool check,
            const std::string& format, const std::string& out) {
  const aoi::SystemConfig c = cfg.build();
  const aoi::ShsModel model = aoi::build_model(c);
  const aoi::ShsSolution sol = aoi::solve(model);
  const aoi::ClosedFormReport rep = aoi::closed_form_check(model, sol);
  if (!dump_path.empty()) emit(aoi::model_to_json(model).dump(2) + "\n", dump_path);

  if (format == "json") {
    json j = result_record(c, "shs", sol.aoi);
    j["states"] = model.state_count;
    j["closed_form_max_rel_dev"] = rep.max_rel();
    j["closed_form_max_abs_dev"] = rep.max_abs();
    emit(j.dump(2) + "\n", out);
  } else {
    std::string csv = "method,value,states,closed_form_max_rel_dev\n";
    csv += "shs," + fmt(sol.aoi) + "," + std::to_string(model.state_count) +
           "," + fmt(rep.max_rel()) + "\n";
    emit(csv, out);
  }
  if (check && rep.max_rel() > 1e-8)
    throw CheckFailure("closed-form deviation " + fmt(rep.max_rel()) +
                       " exceeds 1e-8");
  return 0;
}

// ---------------------------------------------------------------- simulate
int cmd_simulate(const ConfigArgs& cfg, const SimArgs& sa,
                 const std::string& baseline, int servers, double mu_each,
                 double rho, const std::string& trace_path,
                 const std::string& format, const std::string& out) {
  const aoi::SimConfig sim = sa.build();
  aoi::Trace trace;
  aoi::Trace* trace_ptr = trace_path.empty() ? nullptr : &trace;

  aoi::SimResult r;
  json source;
  if (!baseline.empty()) {
    aoi::BaselineDescriptor d;
    if (baseline == "fcfs_mmn")
      d.kind = aoi::BaselineKind::fcfs_mmn;
    else if (baseline == "lcfs_mmn_preempt")
      d.kind = aoi::BaselineKind::lcfs_mmn_preempt;
    else if (baseline == "lcfs_nqueue_preempt")
      d.kind = aoi::BaselineKind::lcfs_nqueue_preempt;
    else
      throw aoi::ValidationError("unknown baseline: " + baseline);
    d.n = servers;
    d.service_rate_each = mu_each;
    d.rho = rho;
    r = aoi::simulate_baseline(d, sim, trace_ptr);
    source = json{{"baseline", baseline},
                  {"n", servers},
                  {"service_rate_each", mu_each},
                  {"rho", rho}};
  } else {
    const aoi::SystemConfig c = cfg.build();
    r = aoi::simulate_hybrid(c, sim, trace_ptr);
    source = aoi::config_to_json(c);
  }
  if (trace_ptr) emit(aoi::trace_to_csv(trace), trace_path);

  if (format == "json") {
    json j{{"config", source},
           {"method", "simulation"},
           {"value", r.mean_aoi},
           {"half_width_95", r.half_width_95},
           {"per_replication", r.per_replication},
           {"events_processed", r.events_processed},
           {"horizon", sim.horizon},
           {"replications", sim.replications},
           {"seed", sim.seed}};
    emit(j.dump(2) + "\n", out);
  } else {
    std::string csv = "method,value,half_width_95,events\n";
    csv += "simulation," + fmt(r.mean_aoi) + "," + fmt(r.half_width_95) + "," +
           std::to_string(r.events_processed) + "\n";
    emit(csv, out);
  }
  return 0;
}

// ----------------------------------------------------------------- compare
int cmd_compare(const std::string& n_list_csv, const std::string& lambda_csv,
                double mu_each, const std::string& methods_csv,
                const SimArgs& sa, bool with_baselines, double rho,
                const std::string& fit_axis, const std::string& format,
                const std::string& out) {
  const std::vector<std::int64_t> n_list = parse_ints(n_list_csv);
  std::vector<double> lambdas =
      lambda_csv.empty() ? std::vector<double>{0.0} : parse_doubles(lambda_csv);
  if (n_list.empty()) throw aoi::ValidationError("--n-list is required");
  const bool want_shs = methods_csv.find("shs") != std::string::npos;
  const bool want_sim = methods_csv.find("sim") != std::string::npos;

  struct Row {
    std::int64_t n;
    double lambda, analytic;
    std::optional<double> shs, sim_mean, sim_hw, fcfs, lcfs_mmn, lcfs_nq;
  };
  std::vector<Row> rows;
  double max_dev = 0.0;
  const aoi::SimConfig sim = sa.build();

  for (std::int64_t n : n_list) {
    for (double lambda : lambdas) {
      aoi::SystemConfig c = aoi::SystemConfig::homogeneous(
          static_cast<int>(n), mu_each, lambda > 0 ? 1 : 0, lambda);
      Row row{};
      row.n = n;
      row.lambda = lambda;
      const auto states =
          aoi::state_space_size(c.n_type1, c.variant() == aoi::Variant::basic
                                               ? aoi::Variant::basic
                                               : aoi::Variant::hybrid);
      row.analytic = states <= aoi::kDefaultStateCap
                         ? (c.variant() == aoi::Variant::basic
                                ? aoi::aoi_basic_exact(c).value
                                : aoi::aoi_hybrid_exact(c).value)
                         : aoi::aoi_hybrid_homogeneous(c.n_type1, c.mu_total(),
                                                       lambda)
                               .value;
      if (want_shs) {
        const aoi::ShsModel model = aoi::build_model(c);
        row.shs = aoi::solve(model).aoi;
        max_dev = std::max(max_dev,
                           std::abs(*row.shs - row.analytic) / row.analytic);
      }
      if (want_sim) {
        const aoi::SimResult r = aoi::simulate_hybrid(c, sim);
        row.sim_mean = r.mean_aoi;
        row.sim_hw = r.half_width_95;
      }
      if (with_baselines) {
        aoi::BaselineDescriptor d;
        d.n = static_cast<int>(n);
        d.service_rate_each = mu_each;
        d.kind = aoi::BaselineKind::fcfs_mmn;
        d.rho = rho;
        row.fcfs = aoi::simulate_baseline(d, sim).mean_aoi;
        d.kind = aoi::BaselineKind::lcfs_mmn_preempt;
        d.rho = 1.0;
        row.lcfs_mmn = aoi::simulate_baseline(d, sim).mean_aoi;
        d.kind = aoi::BaselineKind::lcfs_nqueue_preempt;
        row.lcfs_nq = aoi::simulate_baseline(d, sim).mean_aoi;
      }
      rows.push_back(row);
    }
  }

  std::optional<double> slope;
  if (!fit_axis.empty()) {
    std::vector<double> xs, ys;
    for (const Row& r : rows) {
      xs.push_back(fit_axis == "lambda" ? r.lambda : double(r.n));
      ys.push_back(r.analytic);
    }
    slope = aoi::loglog_slope(xs, ys);
  }

  auto opt = [](const std::optional<double>& v) {
    return v ? fmt(*v) : std::string();
  };
  if (format == "json") {
    json points = json::array();
    for (const Row& r : rows) {
      json p{{"n", r.n}, {"lambda", r.lambda}, {"analytic", r.analytic}};
      if (r.shs) p["shs"] = *r.shs;
      if (r.sim_mean) {
        p["sim_mean"] = *r.sim_mean;
        p["sim_half_width_95"] = *r.sim_hw;
      }
      if (r.fcfs) p["fcfs_mmn"] = *r.fcfs;
      if (r.lcfs_mmn) p["lcfs_mmn_preempt"] = *r.lcfs_mmn;
      if (r.lcfs_nq) p["lcfs_nqueue_preempt"] = *r.lcfs_nq;
      points.push_back(p);
    }
    json j{{"points", points},
           {"max_rel_dev_analytic_shs", want_shs ? json(max_dev) : json()}};
    if (slope) j["loglog_slope"] = *slope;
    emit(j.dump(2) + "\n", out);
  } else {
    std::string csv =
        "n,lambda,analytic,shs,sim_mean,sim_half_width_95,fcfs_mmn,"
        "lcfs_mmn_preempt,lcfs_nqueue_preempt\n";
    for (const Row& r : rows)
      csv += std::to_string(r.n) + "," + fmt(r.lambda) + "," +
             fmt(r.analytic) + "," + opt(r.shs) + "," + opt(r.sim_mean) + "," +
             opt(r.sim_hw) + "," + opt(r.fcfs) + "," + opt(r.lcfs_mmn) + "," +
             opt(r.lcfs_nq) + "\n";
    if (want_shs)
      csv += "# max_rel_dev_analytic_shs=" + fmt(max_dev) + "\n";
    if (slope) csv += "# loglog_slope=" + fmt(*slope) + "\n";
    emit(csv, out);
  }
  return 0;
}

// ------------------------------------------------------------------- sweep
int cmd_sweep(const std::string& var, const std::string& values_csv,
              double from, double to, int points, bool log_grid, int n_fixed,
              double mu_each, double lambda_total, const std::string& format,
              const std::string& out) {
  std::vector<double> xs;
  if (!values_csv.empty()) {
    xs = parse_doubles(values_csv);
  } else {
    if (points < 2 || !(to > from))
      throw aoi::ValidationError("sweep needs --values or --from/--to/--points");
    for (int i = 0; i < points; ++i) {
      const double f = double(i) / (points - 1);
      xs.push_back(log_grid ? from * std::pow(to / from, f)
                            : from + f * (to - from));
    }
  }

  std::string series;
  auto value_at = [&](double x) -> double {
    std::int64_t n = n_fixed;
    double mu_i = mu_each, lambda = lambda_total;
    if (var == "n")
      n = static_cast<std::int64_t>(std::llround(x));
    else if (var == "lambda")
      lambda = x;
    else if (var == "mu_each")
      mu_i = x;
    else
      throw aoi::ValidationError("--var must be n, lambda, or mu_each");
    if (n == 0) return aoi::aoi_type2_only(lambda).value;
    return aoi::aoi_hybrid_homogeneous(n, n * mu_i, lambda).value;
  };
  {
    std::ostringstream s;
    s << "var=" << var << ";n=" << n_fixed << ";mu_each=" << mu_each
      << ";lambda=" << lambda_total;
    series = s.str();
  }

  if (format == "json") {
    json arr = json::array();
    for (double x : xs)
      arr.push_back({{"x", x}, {"series", series}, {"y", value_at(x)}});
    emit(arr.dump(2) + "\n", out);
  } else {
    std::string csv = "x,series,y\n";
    for (double x : xs)
      csv += fmt(x) + "," + series + "," + fmt(value_at(x)) + "\n";
    emit(csv, out);
  }
  return 0;
}

// ---------------------------------------------------------------- optimize
int cmd_optimize(double k, double dcost, const std::string& grid_csv,
                 double mu_i, double lambda_i, bool surface,
                 const std::string& format, const std::string& out) {
  if (!grid_csv.empty()) {
    std::vector<double> grid = parse_doubles(grid_csv);
    const aoi::ThresholdInterval t =
        aoi::threshold_interval(k, mu_i, lambda_i, grid);
    if (!t.left_observed)
      std::cerr << "warning: no pure type-1 region observed at the low end of "
                   "the grid\n";
    if (!t.right_observed)
      std::cerr << "warning: no pure type-2 region observed at the high end "
                   "of the grid\n";
    if (format == "json") {
      emit(json{{"k", k},
                {"left", t.left},
                {"right", t.right},
                {"left_observed", t.left_observed},
                {"right_observed", t.right_observed}}
                   .dump(2) +
               "\n",
           out);
    } else {
      std::string csv = "k,left,right,left_observed,right_observed\n";
      csv += fmt(k) + "," + fmt(t.left) + "," + fmt(t.right) + "," +
             (t.left_observed ? "1" : "0") + "," +
             (t.right_observed ? "1" : "0") + "\n";
      emit(csv, out);
    }
    return 0;
  }

  if (surface) {
    const auto rows = aoi::aoi_surface(k, dcost, mu_i, lambda_i);
    std::string csv = "k,d_cost,n,m,aoi,ratio\n";
    for (const auto& r : rows)
      csv += fmt(k) + "," + fmt(dcost) + "," + std::to_string(r.n) + "," +
             std::to_string(r.m) + "," + fmt(r.aoi) + "," + fmt(r.ratio) +
             "\n";
    emit(csv, out);
    return 0;
  }

  const aoi::DeploymentPoint p =
      aoi::optimal_deployment(k, dcost, mu_i, lambda_i);
  if (format == "json") {
    emit(json{{"k", k},
              {"d_cost", dcost},
              {"n", p.n},
              {"m", p.m},
              {"cost", p.cost},
              {"aoi", p.aoi}}
                 .dump(2) +
             "\n",
         out);
  } else {
    std::string csv = "k,d_cost,n,m,aoi,ratio\n";
    aoi::DeploymentEvaluator eval(k, mu_i, lambda_i);
    const double base =
        eval.aoi(static_cast<int>(std::floor(dcost + 1e-9)), 0);
    csv += fmt(k) + "," + fmt(dcost) + "," + std::to_string(p.n) + "," +
           std::to_string(p.m) + "," + fmt(p.aoi) + "," + fmt(p.aoi / base) +
           "\n";
    emit(csv, out);
  }
  return 0;
}

// ------------------------------------------------------------------ tables
int cmd_tables(const std::string& which, bool check, const std::string& format,
               const std::string& out) {
  namespace rt = aoi::reference_tables;
  std::vector<std::string> offenders;
  std::string csv = "table,n,m,ratio_percent\n";
  json jrows = json::array();

  if (which == "1" || which == "both") {
    std::vector<std::int64_t> ns;
    for (const auto& cell : rt::kBasicRatios) ns.push_back(cell.n);
    const auto rows = aoi::ratio_table_basic(ns);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      csv += "1," + std::to_string(rows[i].n) + ",," +
             fmt_percent(rows[i].ratio) + "\n";
      jrows.push_back({{"table", 1}, {"n", rows[i].n},
                       {"ratio_percent", rows[i].ratio * 100.0}});
      if (check && std::abs(rows[i].ratio -
                            rt::kBasicRatios[i].percent / 100.0) >
                       rt::kCheckToleranceFraction)
        offenders.push_back("table1 N=" + std::to_string(rows[i].n));
    }
  }
  if (which == "2" || which == "both") {
    std::vector<std::int64_t> ns(rt::kHybridRatioN.begin(),
                                 rt::kHybridRatioN.end());
    std::vector<std::int64_t> ms(rt::kHybridRatioM.begin(),
                                 rt::kHybridRatioM.end());
    const auto rows = aoi::ratio_table_hybrid(ns, ms);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      for (std::size_t j = 0; j < ms.size(); ++j) {
        const auto& r = rows[i * ms.size() + j];
        csv += "2," + std::to_string(r.n) + "," + std::to_string(r.m) + "," +
               fmt_percent(r.ratio) + "\n";
        jrows.push_back({{"table", 2}, {"n", r.n}, {"m", r.m},
                         {"ratio_percent", r.ratio * 100.0}});
        if (check &&
            std::abs(r.ratio - rt::kHybridRatios[i][j] / 100.0) >
                rt::kCheckToleranceFraction)
          offenders.push_back("table2 N=" + std::to_string(r.n) +
                              " M=" + std::to_string(r.m));
      }
    }
  }

  emit(format == "json" ? jrows.dump(2) + "\n" : csv, out);
  if (!offenders.empty()) {
    std::string msg = "table cells outside tolerance:";
    for (const auto& o : offenders) msg += " " + o;
    throw CheckFailure(msg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Average age of multi-device status-update systems"};
  app.require_subcommand(1);

  std::string format = "json", out_path;
  app.add_option("--format", format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", out_path, "write output to a file instead of stdout");
  app.fallthrough();

  // analytic
  auto* analytic = app.add_subcommand("analytic", "closed-form average age");
  ConfigArgs an_cfg;
  an_cfg.attach(analytic);
  std::string method = "auto";
  analytic->add_option("--method", method,
                       "auto, theorem1, theorem2, corollary1, corollary2, "
                       "or remark1");

  // shs
  auto* shs = app.add_subcommand(
      "shs", "Markov-solver average age (independent of the closed forms)");
  ConfigArgs shs_cfg;
  shs_cfg.attach(shs);
  std::string dump_path;
  bool shs_check = false;
  shs->add_option("--dump-model", dump_path, "write the model as JSON");
  shs->add_flag("--check", shs_check,
                "fail (exit 2) if solver and closed forms disagree > 1e-8");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "discrete-event simulation");
  ConfigArgs sim_cfg;
  sim_cfg.attach(simulate);
  SimArgs sim_args;
  sim_args.attach(simulate);
  std::string baseline, trace_path;
  int servers = 1;
  double mu_each_b = 1.0, rho = 0.56;
  simulate->add_option(
      "--baseline", baseline,
      "simulate a reference system instead: fcfs_mmn, lcfs_mmn_preempt, or "
      "lcfs_nqueue_preempt");
  simulate->add_option("--servers", servers, "baseline servers/queues");
  simulate->add_option("--baseline-mu", mu_each_b,
                       "baseline per-server service rate");
  simulate->add_option("--rho", rho, "baseline load");
  simulate->add_option("--trace", trace_path,
                       "write the replication-0 event trace as CSV");

  // compare
  auto* compare = app.add_subcommand(
      "compare", "run several methods on a grid and report deviations");
  std::string n_list, lambda_list, methods = "analytic,shs,sim", fit_axis;
  double cmp_mu_each = 1.0, cmp_rho = 0.56;
  bool with_baselines = false;
  SimArgs cmp_sim;
  cmp_sim.attach(compare);
  compare->add_option("--n-list", n_list, "type-1 device counts")->required();
  compare->add_option("--lambda-list", lambda_list,
                      "aggregate type-2 rates (default 0)");
  compare->add_option("--mu-each", cmp_mu_each, "per-device service rate");
  compare->add_option("--methods", methods,
                      "subset of analytic,shs,sim (analytic always runs)");
  compare->add_flag("--with-baselines", with_baselines,
                    "add simulated baseline columns");
  compare->add_option("--rho", cmp_rho, "FCFS baseline load");
  compare->add_option("--fit", fit_axis,
                      "log-log slope of the analytic value vs n or lambda");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "plot-ready single-variable sweep");
  std::string var, values;
  double from = 0.0, to = 0.0;
  int points = 0, sweep_n = 1;
  bool log_grid = false;
  double sweep_mu_each = 1.0, sweep_lambda = 0.0;
  sweep->add_option("--var", var, "n, lambda, or mu_each")->required();
  sweep->add_option("--values", values, "explicit x values");
  sweep->add_option("--from", from, "grid start");
  sweep->add_option("--to", to, "grid end");
  sweep->add_option("--points", points, "grid size");
  sweep->add_flag("--log", log_grid, "geometric grid");
  sweep->add_option("--n", sweep_n, "fixed type-1 count");
  sweep->add_option("--mu-each", sweep_mu_each, "fixed per-device rate");
  sweep->add_option("--lambda", sweep_lambda, "fixed aggregate type-2 rate");

  // optimize
  auto* optimize =
      app.add_subcommand("optimize", "deployment mix under a budget");
  double k = 2.0, dcost = 100.0, mu_i = 1.0, lambda_i = 1.0;
  std::string dcost_grid;
  bool surface = false;
  optimize->add_option("--k", k, "cost of one type-2 device (type-1 costs 1)");
  optimize->add_option("--dcost", dcost, "total budget");
  optimize->add_option("--dcost-grid", dcost_grid,
                       "budget grid for the threshold interval");
  optimize->add_option("--mu-i", mu_i, "per type-1 device rate");
  optimize->add_option("--lambda-i", lambda_i, "per type-2 device rate");
  optimize->add_flag("--surface", surface,
                     "emit every feasible deployment, not just the optimum");

  // tables
  auto* tables =
      app.add_subcommand("tables", "reference ratio tables of both systems");
  std::string which = "both";
  bool tables_check = false;
  tables->add_option("--which", which, "1, 2, or both")
      ->check(CLI::IsMember({"1", "2", "both"}));
  tables->add_flag("--check", tables_check,
                   "fail (exit 2) on deviation from the reference values");

  try {
    app.parse(argc, argv);
    if (analytic->parsed())
      return cmd_analytic(an_cfg, method, format, out_path);
    if (shs->parsed())
      return cmd_shs(shs_cfg, dump_path, shs_check, format, out_path);
    if (simulate->parsed())
      return cmd_simulate(sim_cfg, sim_args, baseline, servers, mu_each_b, rho,
                          trace_path, format, out_path);
    if (compare->parsed())
      return cmd_compare(n_list, lambda_list, cmp_mu_each, methods, cmp_sim,
                         with_baselines, cmp_rho, fit_axis, format, out_path);
    if (sweep->parsed())
      return cmd_sweep(var, values, from, to, points, log_grid, sweep_n,
                       sweep_mu_each, sweep_lambda, format, out_path);
    if (optimize->parsed())
      return cmd_optimize(k, dcost, dcost_grid, mu_i, lambda_i, surface,
                          format, out_path);
    if (tables->parsed())
      return cmd_tables(which, tables_check, format, out_path);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 2;
  } catch (const aoi::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const aoi::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
