#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "savsim/run.hpp"
#include "savsim/scenario.hpp"

namespace {

savsim::SweepAxis parse_axis(const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw savsim::ConfigError("bad --axis '" + spec + "', expected name=v1,v2,...");
  savsim::SweepAxis axis;
  axis.name = spec.substr(0, eq);
  for (const auto& v : savsim::csv::split_line(spec.substr(eq + 1)))
    axis.values.push_back(savsim::csv::to_double(v, "--axis " + axis.name));
  return axis;
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  savsim::Scenario s = savsim::load_scenario(config_path);
  std::string out = out_override.empty() ? s.resolve(s.config.output_dir) : out_override;
  savsim::RunOutput result = savsim::run_scenario(s, out);
  std::printf("run complete: %s\n", out.c_str());
  std::printf("  legs=%ld sav_share=%.2f%% requests=%ld served=%ld rejected=%ld\n",
              result.kpi.total_legs,
              result.kpi.modal_split_pct[static_cast<std::size_t>(savsim::Mode::sav)],
              result.kpi.sav_requests, result.kpi.sav_served, result.kpi.sav_rejected);
  std::printf("  wait_mean=%.1fs empty_ratio=%.3f pkt=%.1fkm convergence=%.4f\n",
              result.kpi.wait_s.mean, result.kpi.empty_distance_ratio, result.kpi.pkt_km,
              result.equilibrium.convergence_stat);
  const auto& v = result.kpi.violations;
  if (v.wait_over_max || v.unflagged_detour || v.capacity_exceeded || v.scheduled_rejected) {
    std::fprintf(stderr, "invariant violations detected: wait=%ld detour=%ld capacity=%ld resched=%ld\n",
                 v.wait_over_max, v.unflagged_detour, v.capacity_exceeded, v.scheduled_rejected);
    return 2;
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& axis_specs,
              const std::string& out) {
  savsim::ScenarioConfig base = savsim::load_config(config_path);
  std::vector<savsim::SweepAxis> axes;
  for (const auto& spec : axis_specs) axes.push_back(parse_axis(spec));
  if (axes.empty()) throw savsim::ConfigError("sweep: at least one --axis is required");
  savsim::SweepResult result = savsim::run_sweep(base, axes, out);
  std::printf("sweep complete: %zu runs -> %s/kpi.csv\n", result.runs.size(), out.c_str());
  for (const auto& f : result.findings)
    std::printf("  %s %s value=%.4f %s\n", f.pass ? "PASS" : "FAIL", f.name.c_str(), f.value,
                f.detail.c_str());
  return 0;
}

int cmd_report(const std::string& kpi_csv, const std::string& out) {
  savsim::write_report_tables(kpi_csv, out);
  std::printf("report tables written to %s\n", out.c_str());
  return 0;
}

int cmd_make_scenario(const std::string& preset, const std::string& out, int fleet, int capacity,
                      int ridesharing, int rebalancing, int iterations, long population,
                      std::uint64_t seed) {
  savsim::GridSpec spec;
  if (preset == "grid16")
    spec = savsim::grid16_spec();
  else if (preset == "grid8")
    spec = savsim::grid8_spec();
  else
    throw savsim::ConfigError("unknown preset: " + preset + " (available: grid16, grid8)");
  if (fleet >= 0) spec.fleet_size = fleet;
  if (capacity > 0) spec.fleet_capacity = capacity;
  if (ridesharing >= 0) spec.ridesharing = ridesharing != 0;
  if (rebalancing >= 0) spec.rebalancing = rebalancing != 0;
  if (iterations > 0) spec.iterations = iterations;
  if (population > 0) spec.population = population;
  if (seed > 0) spec.seed = seed;
  savsim::make_grid_scenario(spec, out);
  std::printf("scenario '%s' written to %s (config.json + input CSVs)\n", preset.c_str(),
              out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"savsim: shared-autonomous-vehicle service simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, kpi_csv, preset = "grid16";
  std::vector<std::string> axis_specs;
  int fleet = -1, capacity = -1, ridesharing = -1, rebalancing = -1, iterations = -1;
  long population = -1;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "run one scenario to equilibrium");
  run->add_option("--config", config_path, "scenario config.json")->required();
  run->add_option("--out", out_dir, "override the output directory");

  auto* sweep = app.add_subcommand("sweep", "run a scenario grid");
  sweep->add_option("--config", config_path, "base scenario config.json")->required();
  sweep->add_option("--axis", axis_specs,
                    "axis spec, e.g. fleet=50,100,150 capacity=2,4,6 ridesharing=0,1 "
                    "rebalancing=0,1 shared_fare_mult=1.0,0.875,0.75");
  sweep->add_option("--out", out_dir, "sweep output directory")->required();

  auto* report = app.add_subcommand("report", "pivot kpi.csv into plot-ready tables");
  report->add_option("--in", kpi_csv, "aggregated kpi.csv")->required();
  report->add_option("--out", out_dir, "output directory")->required();

  auto* make = app.add_subcommand("make-scenario", "emit a synthetic grid-city scenario");
  make->add_option("--preset", preset, "grid16 (default) or grid8");
  make->add_option("--out", out_dir, "scenario directory")->required();
  make->add_option("--fleet", fleet, "fleet size override");
  make->add_option("--capacity", capacity, "seats per vehicle (2, 4 or 6)");
  make->add_option("--ridesharing", ridesharing, "0 or 1");
  make->add_option("--rebalancing", rebalancing, "0 or 1");
  make->add_option("--iterations", iterations, "equilibrium iterations");
  make->add_option("--population", population, "number of agents");
  make->add_option("--seed", seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir);
    if (sweep->parsed()) return cmd_sweep(config_path, axis_specs, out_dir);
    if (report->parsed()) return cmd_report(kpi_csv, out_dir);
    if (make->parsed())
      return cmd_make_scenario(preset, out_dir, fleet, capacity, ridesharing, rebalancing,
                               iterations, population, seed);
  } catch (const savsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const savsim::InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
