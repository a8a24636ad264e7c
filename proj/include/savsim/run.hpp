#pragma once

#include <cstdlib>
#include <future>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "savsim/coevolution.hpp"
#include "savsim/metrics.hpp"
#include "savsim/scenario.hpp"

namespace savsim {

struct RunOutput {
  KpiReport kpi;
  EquilibriumResult equilibrium;
  std::string output_dir;
};

/// Builds the initial population and plans deterministically from the
/// scenario's seed: synthesis, chain allocation, location assignment.
inline void build_population(const Scenario& s, std::vector<Person>& persons,
                             std::vector<PlanMemory>& memories) {
  auto synth_rng = make_rng(s.config.seed, 0x90b5a1ce11ull);
  persons = synthesize(s.seed_sample, s.controls, synth_rng, s.config.scoring.age_band_bounds,
                       s.config.synthesis_epsilon, s.config.sample_rate);
  memories.clear();
  memories.reserve(persons.size());
  for (PersonIdx p = 0; p < persons.size(); ++p) {
    auto rng = make_rng(s.config.seed, 0xc4a19b2d7full, p);
    Plan plan = allocate_chain(persons[p], s.templates, rng);
    assign_locations(persons[p], plan, s.od, s.zones, s.home_type, s.work_type, s.study_type, rng);
    PlanMemory mem(s.config.coevolution.memory_size);
    mem.add_and_select(std::move(plan));
    memories.push_back(std::move(mem));
  }
}

inline void write_iteration_log(const std::vector<IterationStats>& stats, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  auto f = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  for (const auto& s : stats)
    rows.push_back({std::to_string(s.iteration), f(s.mean_executed_score), f(s.mode_share_pct[0]),
                    f(s.mode_share_pct[1]), f(s.mode_share_pct[2]), f(s.mode_share_pct[3]),
                    std::to_string(s.sav_requests), std::to_string(s.sav_served),
                    std::to_string(s.sav_rejected), f(s.sav_mean_wait_s),
                    std::to_string(s.stranded)});
  csv::write_file(path,
                  {"iteration", "mean_executed_score", "share_car", "share_pt", "share_walk",
                   "share_sav", "sav_requests", "sav_served", "sav_rejected", "sav_mean_wait_s",
                   "stranded"},
                  rows);
}

/// Full scenario run: synthesize -> equilibrium -> events/kpi outputs.
/// Outputs land in `out_dir` (created if needed): population.csv, plans.csv,
/// iterations.csv, events.csv[.gz], kpi.json, kpi.csv.
inline RunOutput run_scenario(const Scenario& s, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<Person> persons;
  std::vector<PlanMemory> memories;
  build_population(s, persons, memories);

  const auto& act_types = s.config.scoring.activity_types;
  write_population(persons, (fs::path(out_dir) / "population.csv").string());
  {
    std::vector<Plan> plans;
    plans.reserve(memories.size());
    for (const auto& m : memories) plans.push_back(m.selected_plan());
    write_plans(persons, plans, s.net, act_types, (fs::path(out_dir) / "plans.csv").string());
  }

  MobsimConfig mcfg;
  mcfg.sample_rate = s.config.sample_rate;
  mcfg.horizon_cap = static_cast<Time>(s.config.horizon_hours) * kSecondsPerHour;
  mcfg.teleport = s.config.teleport;
  mcfg.fares = s.config.scoring.fares;
  mcfg.dispatch = s.config.dispatch;
  mcfg.ridesharing = s.config.ridesharing;
  mcfg.rebalancing = s.config.rebalancing;
  mcfg.rebalance = s.config.rebalance;

  int effective_fleet = static_cast<int>(std::lround(s.config.fleet_size * s.config.sample_rate));
  std::vector<SavVehicle> fleet;
  if (effective_fleet > 0) fleet = seed_fleet(effective_fleet, s.config.fleet_capacity, s.depots);

  CellGrid grid(s.net, s.config.rebalance.cell_meters);

  Equilibrium eq(s.net, s.config.scoring, persons, std::move(memories), mcfg, s.config.coevolution,
                 std::move(fleet), &grid, s.home_type, s.parking_by_link);
  RunOutput out;
  out.equilibrium = eq.run();
  out.output_dir = out_dir;

  write_iteration_log(out.equilibrium.iterations, (fs::path(out_dir) / "iterations.csv").string());
  std::string events_path =
      (fs::path(out_dir) / (s.config.events_gzip ? "events.csv.gz" : "events.csv")).string();
  write_events_csv(out.equilibrium.final_day.events, s.net, act_types, events_path,
                   s.config.events_gzip);

  KpiContext ctx;
  ctx.net = &s.net;
  ctx.fleet_size = effective_fleet;
  ctx.capacity = s.config.fleet_capacity;
  ctx.home_type = s.home_type;
  ctx.num_act_types = static_cast<int>(act_types.size());
  ctx.max_wait_s = s.config.dispatch.max_wait_s;
  ctx.detour_factor = s.config.dispatch.detour_factor;
  out.kpi = compute_kpis(out.equilibrium.final_day.events, ctx);

  std::ofstream kj((fs::path(out_dir) / "kpi.json").string());
  kj << kpi_to_json(out.kpi).dump(2) << "\n";
  kj.close();
  csv::write_file((fs::path(out_dir) / "kpi.csv").string(), kpi_csv_header(),
                  {kpi_csv_row("run", s.config.fleet_size, s.config.fleet_capacity,
                               s.config.ridesharing, s.config.rebalancing, out.kpi)});
  return out;
}

// ---------------------------------------------------------------------------
// parameter sweeps

struct SweepAxis {
  std::string name;  // fleet | capacity | ridesharing | rebalancing | shared_fare_mult
  std::vector<double> values;
};

struct SweepPoint {
  std::string label;
  ScenarioConfig config;
};

inline std::vector<SweepPoint> expand_grid(const ScenarioConfig& base,
                                           const std::vector<SweepAxis>& axes) {
  for (const auto& a : axes)
    if (a.values.empty()) throw ConfigError("sweep: axis " + a.name + " has no values");
  std::vector<SweepPoint> points{{"", base}};
  for (const auto& axis : axes) {
    std::vector<SweepPoint> next;
    for (const auto& p : points) {
      for (double v : axis.values) {
        SweepPoint q = p;
        char buf[64];
        if (axis.name == "fleet") {
          q.config.fleet_size = static_cast<int>(v);
          std::snprintf(buf, sizeof buf, "fleet%d", static_cast<int>(v));
        } else if (axis.name == "capacity") {
          q.config.fleet_capacity = static_cast<int>(v);
          std::snprintf(buf, sizeof buf, "cap%d", static_cast<int>(v));
        } else if (axis.name == "ridesharing") {
          q.config.ridesharing = v != 0;
          std::snprintf(buf, sizeof buf, "share%d", v != 0 ? 1 : 0);
        } else if (axis.name == "rebalancing") {
          q.config.rebalancing = v != 0;
          std::snprintf(buf, sizeof buf, "rebal%d", v != 0 ? 1 : 0);
        } else if (axis.name == "shared_fare_mult") {
          q.config.scoring.fares.sav_shared_per_km = base.scoring.fares.sav_shared_per_km * v;
          std::snprintf(buf, sizeof buf, "fare%.3f", v);
        } else {
          throw ConfigError("sweep: unknown axis " + axis.name);
        }
        q.label += (q.label.empty() ? "" : "_") + std::string(buf);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  if (points.empty()) throw ConfigError("sweep: empty grid");
  return points;
}

inline int sweep_worker_count(std::size_t points) {
  if (const char* env = std::getenv("SAVSIM_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<std::size_t>(points, hw ? hw : 1));
}

struct SweepResult {
  std::vector<std::pair<SweepPoint, KpiReport>> runs;
  std::vector<TrendFinding> findings;
};

/// Runs every grid point (independent scenarios, in parallel up to the worker
/// count), writes per-point outputs under out_dir/<label>/, aggregates
/// kpi.csv and the trend verdicts.
inline SweepResult run_sweep(const ScenarioConfig& base, const std::vector<SweepAxis>& axes,
                             const std::string& out_dir) {
  std::vector<SweepPoint> points = expand_grid(base, axes);
  fs::create_directories(out_dir);

  std::vector<KpiReport> reports(points.size());
  int workers = sweep_worker_count(points.size());
  std::size_t next = 0;
  std::mutex mu;
  auto work = [&]() {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= points.size()) return;
        i = next++;
      }
      Scenario s = load_scenario(points[i].config);
      RunOutput out = run_scenario(s, (fs::path(out_dir) / points[i].label).string());
      reports[i] = std::move(out.kpi);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  SweepResult result;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& c = points[i].config;
    rows.push_back(kpi_csv_row(points[i].label, c.fleet_size, c.fleet_capacity, c.ridesharing,
                               c.rebalancing, reports[i]));
    result.runs.push_back({points[i], reports[i]});
  }
  csv::write_file((fs::path(out_dir) / "kpi.csv").string(), kpi_csv_header(), rows);

  // trend verdicts over whatever structure the grid exposes
  SweepReports sr;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& c = points[i].config;
    if (c.ridesharing && !c.rebalancing)
      sr.fleet_sweep.push_back({static_cast<double>(c.fleet_size), reports[i]});
    if (!c.ridesharing && !c.rebalancing)
      sr.individual.push_back({static_cast<double>(c.fleet_size), reports[i]});
  }
  std::stable_sort(sr.fleet_sweep.begin(), sr.fleet_sweep.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::stable_sort(sr.individual.begin(), sr.individual.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const KpiReport* reb_on = nullptr;
  const KpiReport* reb_off = nullptr;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& c = points[i].config;
    if (c.ridesharing && c.rebalancing && !reb_on) reb_on = &reports[i];
    if (c.ridesharing && !c.rebalancing && !reb_off) reb_off = &reports[i];
  }
  bool has_rebalance_axis = false;
  for (const auto& a : axes) has_rebalance_axis |= a.name == "rebalancing";
  if (has_rebalance_axis) {
    sr.rebalancing_on = reb_on;
    sr.rebalancing_off = reb_off;
  }
  result.findings = trend_compare(sr);

  std::ofstream tf((fs::path(out_dir) / "trends.txt").string());
  for (const auto& f : result.findings)
    tf << (f.pass ? "PASS " : "FAIL ") << f.name << " value=" << f.value << " " << f.detail << "\n";
  return result;
}

// ---------------------------------------------------------------------------
// plot-ready report tables

/// Pivots an aggregated kpi.csv into tidy long-format tables, one CSV per
/// figure family: (scenario, fleet, metric, value).
inline void write_report_tables(const std::string& kpi_csv, const std::string& out_dir) {
  csv::Table t = csv::read_file(kpi_csv);
  fs::create_directories(out_dir);
  int c_scen = t.require_column("scenario", kpi_csv);
  int c_fleet = t.require_column("fleet_size", kpi_csv);

  struct Family {
    const char* file;
    std::vector<std::string> metrics;
  };
  const std::vector<Family> families = {
      {"modal_split.csv", {"share_car", "share_pt", "share_walk", "share_sav"}},
      {"service_times.csv", {"wait_mean_s", "ivt_mean_s", "detour_mean_s"}},
      {"fleet_usage.csv", {"in_service_mean", "empty_ratio"}},
      {"pkt.csv", {"pkt_km", "evk_km"}},
      {"occupancy.csv", {"occ1_pct", "occ2_pct", "occ3_pct", "occ4_pct", "occ5_pct", "occ6_pct"}},
      {"distances.csv",
       {"total_driven_km", "sav_total_km", "sav_empty_km", "veh_km_mean", "veh_km_max",
        "rides_per_sav"}},
  };
  for (const auto& fam : families) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& metric : fam.metrics) {
      int col = t.column(metric);
      if (col < 0) {
        std::fprintf(stderr, "report: metric %s missing from %s, omitted\n", metric.c_str(),
                     kpi_csv.c_str());
        continue;
      }
      for (const auto& r : t.rows) rows.push_back({r[c_scen], r[c_fleet], metric, r[col]});
    }
    csv::write_file((fs::path(out_dir) / fam.file).string(), {"scenario", "fleet", "metric", "value"},
                    rows);
  }
}

}  // namespace savsim
