#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "savsim/coevolution.hpp"
#include "savsim/common.hpp"
#include "savsim/metrics.hpp"
#include "savsim/mobsim.hpp"
#include "savsim/network.hpp"
#include "savsim/population.hpp"
#include "savsim/scoring.hpp"

#include "json.hpp"

namespace savsim {

namespace fs = std::filesystem;
using nlohmann::json;

/// One structured config file fully determines a run; there are no hidden
/// defaults outside this schema. Paths are relative to the config file.
struct ScenarioConfig {
  // run
  int iterations = 100;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double sample_rate = 1.0;
  std::string output_dir = "out";
  int horizon_hours = 48;
  bool events_gzip = false;

  // inputs
  std::string nodes_file = "nodes.csv";
  std::string links_file = "links.csv";
  std::string zones_file = "zones.csv";
  Time travel_time_bin_s = 900;
  std::string controls_file = "controls.csv";
  std::string chains_file = "chains.csv";
  std::string od_file = "od.csv";
  std::string seed_sample_file = "seed.csv";
  double synthesis_epsilon = 0.05;
  std::string home_type = "home";
  std::string work_type = "work";
  std::string study_type = "study";

  ScoringParams scoring;
  TeleportParams teleport;

  // fleet
  int fleet_size = 0;
  int fleet_capacity = 4;
  bool ridesharing = true;
  bool rebalancing = false;
  std::vector<std::string> depot_links;
  DispatchParams dispatch;
  RebalanceParams rebalance;

  EquilibriumConfig coevolution;

  std::string base_dir = ".";
};

// ---------------------------------------------------------------------------
// config (de)serialization

inline json scoring_to_json(const ScoringParams& s) {
  json activities = json::array();
  for (std::size_t i = 0; i < s.activity_types.size(); ++i)
    activities.push_back({{"type", s.activity_types[i]},
                          {"typical_duration_s", s.activities[i].typical_duration_s},
                          {"beta_per_h", s.activities[i].beta_duration_per_h}});
  json taste = json::array();
  for (const auto& r : s.taste_rules) {
    json jr;
    if (r.socprof) jr["socprof"] = socprof_name(*r.socprof);
    if (r.gender) jr["gender"] = gender_name(*r.gender);
    if (r.age_band) jr["age_band"] = *r.age_band;
    if (r.income_band) jr["income_band"] = *r.income_band;
    jr["f_time"] = r.f_time;
    jr["f_cost"] = r.f_cost;
    taste.push_back(jr);
  }
  auto mode_json = [](const ModeParams& m) {
    return json{{"asc", m.asc}, {"beta_travel_per_h", m.beta_travel_per_h}};
  };
  return json{{"activities", activities},
              {"modes",
               {{"car", mode_json(s.mode_car)},
                {"pt", mode_json(s.mode_pt)},
                {"walk", mode_json(s.mode_walk)},
                {"sav", mode_json(s.mode_sav)}}},
              {"beta_cost_per_eur", s.beta_cost_per_eur},
              {"wait_multiplier", s.wait_multiplier},
              {"car_ownership_bonus", s.car_ownership_bonus},
              {"parking_penalty", s.parking_penalty},
              {"rejection_penalty", s.rejection_penalty},
              {"extended_detour_per_h", s.extended_detour_per_h},
              {"stranded_penalty", s.stranded_penalty},
              {"age_band_bounds", s.age_band_bounds},
              {"taste", taste},
              {"fares",
               {{"sav_individual_per_km", s.fares.sav_individual_per_km},
                {"sav_shared_per_km", s.fares.sav_shared_per_km},
                {"car_per_km", s.fares.car_per_km},
                {"pt_flat", s.fares.pt_flat}}}};
}

inline ScoringParams scoring_from_json(const json& j) {
  ScoringParams s;
  s.activity_types.clear();
  s.activities.clear();
  for (const auto& a : j.at("activities")) {
    s.activity_types.push_back(a.at("type").get<std::string>());
    s.activities.push_back(
        {a.at("typical_duration_s").get<double>(), a.at("beta_per_h").get<double>()});
  }
  auto mode_from = [](const json& m) {
    return ModeParams{m.at("asc").get<double>(), m.at("beta_travel_per_h").get<double>()};
  };
  s.mode_car = mode_from(j.at("modes").at("car"));
  s.mode_pt = mode_from(j.at("modes").at("pt"));
  s.mode_walk = mode_from(j.at("modes").at("walk"));
  s.mode_sav = mode_from(j.at("modes").at("sav"));
  s.beta_cost_per_eur = j.at("beta_cost_per_eur").get<double>();
  s.wait_multiplier = j.at("wait_multiplier").get<double>();
  s.car_ownership_bonus = j.at("car_ownership_bonus").get<double>();
  s.parking_penalty = j.at("parking_penalty").get<double>();
  s.rejection_penalty = j.at("rejection_penalty").get<double>();
  s.extended_detour_per_h = j.at("extended_detour_per_h").get<double>();
  s.stranded_penalty = j.at("stranded_penalty").get<double>();
  s.age_band_bounds = j.at("age_band_bounds").get<std::vector<int>>();
  for (const auto& jr : j.at("taste")) {
    TasteRule r;
    if (jr.contains("socprof")) r.socprof = socprof_from_name(jr.at("socprof").get<std::string>());
    if (jr.contains("gender")) r.gender = gender_from_name(jr.at("gender").get<std::string>());
    if (jr.contains("age_band")) r.age_band = jr.at("age_band").get<int>();
    if (jr.contains("income_band")) r.income_band = jr.at("income_band").get<int>();
    r.f_time = jr.at("f_time").get<double>();
    r.f_cost = jr.at("f_cost").get<double>();
    s.taste_rules.push_back(r);
  }
  const auto& f = j.at("fares");
  s.fares.sav_individual_per_km = f.at("sav_individual_per_km").get<double>();
  s.fares.sav_shared_per_km = f.at("sav_shared_per_km").get<double>();
  s.fares.car_per_km = f.at("car_per_km").get<double>();
  s.fares.pt_flat = f.at("pt_flat").get<double>();
  if (s.wait_multiplier < 1) throw ConfigError("scoring: wait_multiplier must be >= 1");
  if (s.beta_cost_per_eur <= 0) throw ConfigError("scoring: beta_cost_per_eur must be > 0");
  for (Mode m : {Mode::car, Mode::pt, Mode::walk, Mode::sav})
    if (s.mode(m).beta_travel_per_h > 0)
      throw ConfigError("scoring: beta_travel_per_h must be <= 0");
  return s;
}

inline json config_to_json(const ScenarioConfig& c) {
  return json{
      {"run",
       {{"iterations", c.iterations},
        {"seed", c.seed},
        {"sample_rate", c.sample_rate},
        {"output_dir", c.output_dir},
        {"horizon_hours", c.horizon_hours},
        {"events_gzip", c.events_gzip}}},
      {"network",
       {{"nodes", c.nodes_file}, {"links", c.links_file}, {"travel_time_bin_s", c.travel_time_bin_s}}},
      {"zones", c.zones_file},
      {"population",
       {{"controls", c.controls_file},
        {"chains", c.chains_file},
        {"od", c.od_file},
        {"seed_sample", c.seed_sample_file},
        {"epsilon", c.synthesis_epsilon},
        {"home_type", c.home_type},
        {"work_type", c.work_type},
        {"study_type", c.study_type}}},
      {"scoring", scoring_to_json(c.scoring)},
      {"teleport",
       {{"walk_speed_ms", c.teleport.walk_speed_ms},
        {"pt_speed_ms", c.teleport.pt_speed_ms},
        {"pt_wait_s", c.teleport.pt_wait_s},
        {"beeline_factor", c.teleport.beeline_factor}}},
      {"fleet",
       {{"size", c.fleet_size},
        {"capacity", c.fleet_capacity},
        {"ridesharing", c.ridesharing},
        {"rebalancing", c.rebalancing},
        {"depots", c.depot_links},
        {"dispatch",
         {{"detour_factor", c.dispatch.detour_factor},
          {"max_wait_s", c.dispatch.max_wait_s},
          {"extended_tier", c.dispatch.extended_tier},
          {"stop_seconds", c.dispatch.stop_seconds},
          {"time_buffer_s", c.dispatch.time_buffer_s}}},
        {"rebalance",
         {{"cell_meters", c.rebalance.cell_meters},
          {"interval_s", c.rebalance.interval_s},
          {"idle_threshold_s", c.rebalance.idle_threshold_s},
          {"demand_horizon_s", c.rebalance.demand_horizon_s}}}}},
      {"coevolution",
       {{"memory_size", c.coevolution.memory_size},
        {"innovation_fraction", c.coevolution.innovation_fraction},
        {"select_beta", c.coevolution.select_beta},
        {"innovation_cutoff", c.coevolution.strategies.innovation_cutoff},
        {"time_mutation_bound_s", c.coevolution.time_mutation_bound_s},
        {"strategies",
         {{"reroute", c.coevolution.strategies.reroute},
          {"mode", c.coevolution.strategies.mode_mutation},
          {"time", c.coevolution.strategies.time_mutation}}}}}};
}

inline ScenarioConfig config_from_json(const json& j, const std::string& base_dir = ".") {
  ScenarioConfig c;
  c.base_dir = base_dir;
  const auto& run = j.at("run");
  c.iterations = run.at("iterations").get<int>();
  if (!run.contains("seed")) throw ConfigError("config: run.seed is mandatory");
  c.seed = run.at("seed").get<std::uint64_t>();
  c.seed_set = true;
  c.sample_rate = run.at("sample_rate").get<double>();
  c.output_dir = run.at("output_dir").get<std::string>();
  c.horizon_hours = run.at("horizon_hours").get<int>();
  c.events_gzip = run.at("events_gzip").get<bool>();
  if (c.iterations < 1) throw ConfigError("config: run.iterations must be >= 1");
  if (c.sample_rate <= 0 || c.sample_rate > 1)
    throw ConfigError("config: run.sample_rate must be in (0, 1]");

  const auto& net = j.at("network");
  c.nodes_file = net.at("nodes").get<std::string>();
  c.links_file = net.at("links").get<std::string>();
  c.travel_time_bin_s = net.at("travel_time_bin_s").get<Time>();
  c.zones_file = j.at("zones").get<std::string>();

  const auto& pop = j.at("population");
  c.controls_file = pop.at("controls").get<std::string>();
  c.chains_file = pop.at("chains").get<std::string>();
  c.od_file = pop.at("od").get<std::string>();
  c.seed_sample_file = pop.at("seed_sample").get<std::string>();
  c.synthesis_epsilon = pop.at("epsilon").get<double>();
  c.home_type = pop.at("home_type").get<std::string>();
  c.work_type = pop.at("work_type").get<std::string>();
  c.study_type = pop.at("study_type").get<std::string>();

  c.scoring = scoring_from_json(j.at("scoring"));

  const auto& tp = j.at("teleport");
  c.teleport.walk_speed_ms = tp.at("walk_speed_ms").get<double>();
  c.teleport.pt_speed_ms = tp.at("pt_speed_ms").get<double>();
  c.teleport.pt_wait_s = tp.at("pt_wait_s").get<double>();
  c.teleport.beeline_factor = tp.at("beeline_factor").get<double>();

  const auto& fleet = j.at("fleet");
  c.fleet_size = fleet.at("size").get<int>();
  c.fleet_capacity = fleet.at("capacity").get<int>();
  c.ridesharing = fleet.at("ridesharing").get<bool>();
  c.rebalancing = fleet.at("rebalancing").get<bool>();
  c.depot_links = fleet.at("depots").get<std::vector<std::string>>();
  const auto& disp = fleet.at("dispatch");
  c.dispatch.detour_factor = disp.at("detour_factor").get<double>();
  c.dispatch.max_wait_s = disp.at("max_wait_s").get<double>();
  c.dispatch.extended_tier = disp.at("extended_tier").get<bool>();
  c.dispatch.stop_seconds = disp.at("stop_seconds").get<double>();
  c.dispatch.time_buffer_s = disp.at("time_buffer_s").get<double>();
  if (c.dispatch.detour_factor < 1) throw ConfigError("config: dispatch.detour_factor must be >= 1");
  if (c.dispatch.max_wait_s <= 0) throw ConfigError("config: dispatch.max_wait_s must be > 0");
  const auto& reb = fleet.at("rebalance");
  c.rebalance.cell_meters = reb.at("cell_meters").get<double>();
  c.rebalance.interval_s = reb.at("interval_s").get<Time>();
  c.rebalance.idle_threshold_s = reb.at("idle_threshold_s").get<Time>();
  c.rebalance.demand_horizon_s = reb.at("demand_horizon_s").get<Time>();

  const auto& co = j.at("coevolution");
  c.coevolution.memory_size = co.at("memory_size").get<std::size_t>();
  c.coevolution.innovation_fraction = co.at("innovation_fraction").get<double>();
  c.coevolution.select_beta = co.at("select_beta").get<double>();
  c.coevolution.strategies.innovation_cutoff = co.at("innovation_cutoff").get<double>();
  c.coevolution.time_mutation_bound_s = co.at("time_mutation_bound_s").get<Time>();
  c.coevolution.strategies.reroute = co.at("strategies").at("reroute").get<double>();
  c.coevolution.strategies.mode_mutation = co.at("strategies").at("mode").get<double>();
  c.coevolution.strategies.time_mutation = co.at("strategies").at("time").get<double>();
  c.coevolution.strategies.validate();
  c.coevolution.iterations = c.iterations;
  c.coevolution.seed = c.seed;
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    return config_from_json(j, fs::path(path).parent_path().string());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config schema error: ") + e.what());
  }
}

inline void write_config(const ScenarioConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << config_to_json(c).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// chains / od persistence

inline void write_chains(const std::vector<ChainTemplate>& templates,
                         const std::vector<std::string>& act_types, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : templates) {
    std::string seq, means, sds;
    for (std::size_t i = 0; i < t.act_types.size(); ++i)
      seq += (i ? "|" : "") + act_types[static_cast<std::size_t>(t.act_types[i])];
    for (std::size_t i = 0; i < t.end_mean_s.size(); ++i) {
      means += (i ? "|" : "") + std::to_string(t.end_mean_s[i]);
      sds += (i ? "|" : "") + std::to_string(t.end_sd_s[i]);
    }
    rows.push_back({t.id, socprof_name(t.group), std::to_string(t.probability), seq, means, sds});
  }
  csv::write_file(path, {"template", "group", "probability", "sequence", "end_mean_s", "end_sd_s"},
                  rows);
}

inline std::vector<ChainTemplate> load_chains(const std::string& path,
                                              const std::vector<std::string>& act_types) {
  csv::Table t = csv::read_file(path);
  int ct = t.require_column("template", path);
  int cg = t.require_column("group", path);
  int cp = t.require_column("probability", path);
  int cs = t.require_column("sequence", path);
  int cm = t.require_column("end_mean_s", path);
  int cd = t.require_column("end_sd_s", path);
  auto type_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < act_types.size(); ++i)
      if (act_types[i] == name) return static_cast<int>(i);
    throw ConfigError(path + ": unknown activity type " + name);
  };
  std::vector<ChainTemplate> out;
  for (const auto& r : t.rows) {
    ChainTemplate tpl;
    tpl.id = r[ct];
    tpl.group = socprof_from_name(r[cg]);
    tpl.probability = csv::to_double(r[cp], path);
    for (const auto& s : csv::split_line(r[cs], '|')) tpl.act_types.push_back(type_index(s));
    if (!r[cm].empty())
      for (const auto& s : csv::split_line(r[cm], '|'))
        tpl.end_mean_s.push_back(csv::to_double(s, path));
    if (!r[cd].empty())
      for (const auto& s : csv::split_line(r[cd], '|'))
        tpl.end_sd_s.push_back(csv::to_double(s, path));
    out.push_back(std::move(tpl));
  }
  return out;
}

inline void write_od(const std::vector<std::tuple<std::string, std::string, std::string, double>>& rows,
                     const std::string& path) {
  std::vector<std::vector<std::string>> r;
  for (const auto& [purpose, origin, dest, p] : rows)
    r.push_back({purpose, origin, dest, std::to_string(p)});
  csv::write_file(path, {"purpose", "origin", "dest", "p"}, r);
}

inline OdMatrix load_od(const std::string& path, const std::vector<std::string>& act_types) {
  csv::Table t = csv::read_file(path);
  int cp = t.require_column("purpose", path);
  int co = t.require_column("origin", path);
  int cd = t.require_column("dest", path);
  int cv = t.require_column("p", path);
  auto type_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < act_types.size(); ++i)
      if (act_types[i] == name) return static_cast<int>(i);
    throw ConfigError(path + ": unknown activity type " + name);
  };
  OdMatrix od;
  for (const auto& r : t.rows)
    od.add(type_index(r[cp]), r[co], r[cd], csv::to_double(r[cv], path));
  od.validate();
  return od;
}

inline void write_seed_sample(const std::vector<Person>& seed, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : seed)
    rows.push_back({std::to_string(p.age), gender_name(p.gender), std::to_string(p.income_band),
                    socprof_name(p.socprof), p.car_owner ? "1" : "0"});
  csv::write_file(path, {"age", "gender", "income_band", "socprof", "car_owner"}, rows);
}

inline std::vector<Person> load_seed_sample(const std::string& path) {
  csv::Table t = csv::read_file(path);
  int ca = t.require_column("age", path);
  int cg = t.require_column("gender", path);
  int cb = t.require_column("income_band", path);
  int cs = t.require_column("socprof", path);
  int cc = t.require_column("car_owner", path);
  std::vector<Person> out;
  for (const auto& r : t.rows) {
    Person p;
    p.age = static_cast<int>(csv::to_long(r[ca], path));
    p.gender = gender_from_name(r[cg]);
    p.income_band = static_cast<int>(csv::to_long(r[cb], path));
    p.socprof = socprof_from_name(r[cs]);
    p.car_owner = csv::to_long(r[cc], path) != 0;
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// fully loaded scenario

struct Scenario {
  ScenarioConfig config;
  Network net;
  ZoneMap zones;
  std::vector<bool> parking_by_link;
  std::vector<Person> seed_sample;
  std::vector<ZoneControls> controls;
  std::vector<ChainTemplate> templates;
  OdMatrix od;
  std::vector<LinkIdx> depots;
  int home_type = -1;
  int work_type = -1;
  int study_type = -1;

  std::string resolve(const std::string& file) const {
    return (fs::path(config.base_dir) / file).string();
  }
};

inline Scenario load_scenario(const ScenarioConfig& config) {
  Scenario s;
  s.config = config;
  auto resolve = [&](const std::string& f) { return (fs::path(config.base_dir) / f).string(); };
  for (const std::string& f : {config.nodes_file, config.links_file, config.zones_file,
                               config.controls_file, config.chains_file, config.od_file,
                               config.seed_sample_file})
    if (!fs::exists(resolve(f))) throw ConfigError("config: missing input file " + resolve(f));

  s.net = load_network(resolve(config.nodes_file), resolve(config.links_file));
  s.zones = load_zones(s.net, resolve(config.zones_file));
  s.parking_by_link.assign(s.net.links.size(), true);
  for (LinkIdx l = 0; l < s.net.links.size(); ++l) {
    const std::string& z = s.zones.zone_of_link[l];
    if (!z.empty()) s.parking_by_link[l] = s.zones.parking.at(z);
  }
  s.seed_sample = load_seed_sample(resolve(config.seed_sample_file));
  s.controls = load_controls(resolve(config.controls_file));
  s.templates = load_chains(resolve(config.chains_file), config.scoring.activity_types);
  s.od = load_od(resolve(config.od_file), config.scoring.activity_types);

  s.home_type = config.scoring.activity_index(config.home_type);
  s.work_type = config.scoring.activity_index(config.work_type);
  s.study_type = config.scoring.activity_index(config.study_type);
  if (s.home_type < 0) throw ConfigError("config: home activity type missing from scoring table");
  validate_templates(s.templates, config.scoring.activity_types, s.home_type);

  for (const auto& d : config.depot_links) s.depots.push_back(s.net.link_index(d));
  if (config.fleet_size > 0 && s.depots.empty())
    throw ConfigError("config: fleet.size > 0 requires depots");
  return s;
}

inline Scenario load_scenario(const std::string& config_path) {
  return load_scenario(load_config(config_path));
}

// ---------------------------------------------------------------------------
// grid-city generator

struct GridSpec {
  std::string name = "grid16";
  int nodes_per_side = 16;
  double spacing_m = 600;
  double free_speed_ms = 13.9;
  double capacity_vph = 1800;
  int lanes = 1;
  int zones_per_side = 4;
  long population = 10000;
  int fleet_size = 200;
  int fleet_capacity = 4;
  bool ridesharing = true;
  bool rebalancing = false;
  int iterations = 100;
  std::uint64_t seed = 20250810;
  long seed_sample_size = 600;
};

inline GridSpec grid16_spec() { return {}; }

inline GridSpec grid8_spec() {
  GridSpec g;
  g.name = "grid8";
  g.nodes_per_side = 8;
  g.zones_per_side = 2;
  g.population = 1200;
  g.fleet_size = 30;
  g.iterations = 20;
  return g;
}

inline Network make_grid_network(const GridSpec& g) {
  std::vector<Node> nodes;
  int n = g.nodes_per_side;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      nodes.push_back({"n" + std::to_string(r) + "_" + std::to_string(c), c * g.spacing_m,
                       r * g.spacing_m});
  auto idx = [&](int r, int c) { return static_cast<NodeIdx>(r * n + c); };
  std::vector<Link> links;
  auto add = [&](int r1, int c1, int r2, int c2) {
    Link l;
    l.id = "l" + std::to_string(r1) + "_" + std::to_string(c1) + "__" + std::to_string(r2) + "_" +
           std::to_string(c2);
    l.from = idx(r1, c1);
    l.to = idx(r2, c2);
    l.length_m = g.spacing_m;
    l.free_speed_ms = g.free_speed_ms;
    l.capacity_vph = g.capacity_vph;
    l.lanes = g.lanes;
    links.push_back(std::move(l));
  };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (c + 1 < n) {
        add(r, c, r, c + 1);
        add(r, c + 1, r, c);
      }
      if (r + 1 < n) {
        add(r, c, r + 1, c);
        add(r + 1, c, r, c);
      }
    }
  return build_network(std::move(nodes), std::move(links));
}

inline std::string grid_zone_id(int zr, int zc) {
  return "z" + std::to_string(zr) + "_" + std::to_string(zc);
}

inline ZoneMap make_grid_zones(const Network& net, const GridSpec& g) {
  ZoneMap zm;
  zm.zone_of_link.assign(net.links.size(), "");
  int cells = g.zones_per_side;
  int per = g.nodes_per_side / cells;
  int lo = cells / 2 - 1, hi = cells / 2;  // central zones have scarce parking
  for (int zr = 0; zr < cells; ++zr)
    for (int zc = 0; zc < cells; ++zc) {
      std::string id = grid_zone_id(zr, zc);
      zm.zones.push_back(id);
      bool central = cells >= 4 && zr >= lo && zr <= hi && zc >= lo && zc <= hi;
      zm.parking[id] = !central;
      zm.links[id] = {};
    }
  for (LinkIdx l = 0; l < net.links.size(); ++l) {
    const Node& a = net.nodes[net.links[l].from];
    int r = static_cast<int>(a.y / g.spacing_m);
    int c = static_cast<int>(a.x / g.spacing_m);
    int zr = std::min(r / per, cells - 1);
    int zc = std::min(c / per, cells - 1);
    std::string id = grid_zone_id(zr, zc);
    zm.links[id].push_back(l);
    zm.zone_of_link[l] = id;
  }
  return zm;
}

inline std::vector<Person> make_grid_seed_sample(const GridSpec& g) {
  auto rng = make_rng(g.seed, 0x5eed5a317ull);
  std::vector<Person> seed;
  struct GroupSpec {
    SocProf group;
    double share;
    int age_lo, age_hi;
    double car_rate;
  };
  const GroupSpec groups[] = {
      {SocProf::employed, 0.45, 25, 60, 0.75}, {SocProf::student, 0.12, 14, 25, 0.15},
      {SocProf::under14, 0.15, 5, 13, 0.0},    {SocProf::retired, 0.18, 62, 85, 0.55},
      {SocProf::unemployed, 0.05, 20, 60, 0.35}, {SocProf::homemaker, 0.05, 25, 60, 0.45},
  };
  for (const auto& gs : groups) {
    long count = std::lround(gs.share * static_cast<double>(g.seed_sample_size));
    for (long k = 0; k < count; ++k) {
      Person p;
      p.socprof = gs.group;
      p.age = uniform_int(rng, gs.age_lo, gs.age_hi);
      p.gender = uniform_real(rng, 0, 1) < 0.5 ? Gender::m : Gender::f;
      double r = uniform_real(rng, 0, 1);
      p.income_band = r < 0.3 ? 0 : (r < 0.8 ? 1 : 2);
      p.car_owner = p.age >= 18 && uniform_real(rng, 0, 1) < gs.car_rate;
      seed.push_back(std::move(p));
    }
  }
  return seed;
}

inline std::vector<ZoneControls> make_grid_controls(const GridSpec& g,
                                                    const std::vector<Person>& seed,
                                                    const std::vector<int>& age_bounds) {
  // zone population weights: perimeter-heavy residences
  int cells = g.zones_per_side;
  std::vector<double> weights;
  double total_w = 0;
  for (int zr = 0; zr < cells; ++zr)
    for (int zc = 0; zc < cells; ++zc) {
      bool edge = zr == 0 || zc == 0 || zr == cells - 1 || zc == cells - 1;
      bool corner = (zr == 0 || zr == cells - 1) && (zc == 0 || zc == cells - 1);
      double w = corner ? 2.0 : (edge ? 1.6 : 1.0);
      weights.push_back(w);
      total_w += w;
    }

  // marginal shares follow the seed sample
  std::map<std::string, double> sp_share, ag_share, in_share;
  for (const auto& p : seed) {
    sp_share[control_level(kAttrSocprof, p, age_bounds)] += 1;
    ag_share[control_level(kAttrAgeGender, p, age_bounds)] += 1;
    in_share[control_level(kAttrIncome, p, age_bounds)] += 1;
  }
  for (auto* m : {&sp_share, &ag_share, &in_share})
    for (auto& [k, v] : *m) v /= static_cast<double>(seed.size());

  std::vector<ZoneControls> out;
  std::size_t zi = 0;
  for (int zr = 0; zr < cells; ++zr)
    for (int zc = 0; zc < cells; ++zc, ++zi) {
      long zone_pop = std::lround(static_cast<double>(g.population) * weights[zi] / total_w);
      ZoneControls zcs;
      zcs.zone = grid_zone_id(zr, zc);
      auto fill = [&](const char* attr, const std::map<std::string, double>& shares) {
        long assigned = 0;
        std::string biggest;
        double biggest_share = -1;
        for (const auto& [level, share] : shares) {
          long cnt = std::lround(share * static_cast<double>(zone_pop));
          zcs.marginals[attr][level] = cnt;
          assigned += cnt;
          if (share > biggest_share) {
            biggest_share = share;
            biggest = level;
          }
        }
        zcs.marginals[attr][biggest] += zone_pop - assigned;  // reconcile rounding
      };
      fill(kAttrSocprof, sp_share);
      fill(kAttrAgeGender, ag_share);
      fill(kAttrIncome, in_share);
      out.push_back(std::move(zcs));
    }
  return out;
}

inline ScoringParams make_grid_scoring() {
  ScoringParams s;
  // toy defaults, not calibrated to any survey
  struct A {
    const char* type;
    double hours;
  };
  const A acts[] = {{"home", 12},   {"work", 8},    {"study", 7},   {"shopping", 1.2},
                    {"leisure", 2}, {"escort", 0.5}, {"personal", 1}, {"medical", 1},
                    {"other", 1}};
  for (const auto& a : acts) {
    s.activity_types.push_back(a.type);
    s.activities.push_back({a.hours * 3600.0, 6.0});
  }
  s.mode_car = {0.0, -6.0};
  s.mode_pt = {-0.6, -6.0};
  s.mode_walk = {0.0, -10.0};
  s.mode_sav = {-0.3, -6.0};
  s.beta_cost_per_eur = 0.5;
  s.wait_multiplier = 1.5;
  s.car_ownership_bonus = 0.3;
  s.parking_penalty = -1.0;
  s.rejection_penalty = -20.0;
  s.extended_detour_per_h = 6.0;
  s.stranded_penalty = -200.0;
  s.taste_rules = {
      {SocProf::retired, {}, {}, {}, 1.4, 1.3},
      {SocProf::student, {}, {}, {}, 0.85, 0.9},
      {SocProf::under14, {}, {}, {}, 1.0, 1.0},
      {SocProf::homemaker, {}, {}, {}, 1.2, 1.1},
      {{}, Gender::f, {}, {}, 1.1, 1.0},
      {{}, {}, {}, 2, 1.0, 0.8},  // top income band
  };
  return s;
}

/// Writes the complete input set of a synthetic grid city (network, zones,
/// controls, chains, od, seed sample, config.json) into `dir`.
inline ScenarioConfig make_grid_scenario(const GridSpec& g, const std::string& dir) {
  fs::create_directories(dir);
  Network net = make_grid_network(g);
  write_network(net, (fs::path(dir) / "nodes.csv").string(), (fs::path(dir) / "links.csv").string());
  ZoneMap zones = make_grid_zones(net, g);
  write_zones(net, zones, (fs::path(dir) / "zones.csv").string());

  ScoringParams scoring = make_grid_scoring();
  std::vector<Person> seed = make_grid_seed_sample(g);
  write_seed_sample(seed, (fs::path(dir) / "seed.csv").string());
  write_controls(make_grid_controls(g, seed, scoring.age_band_bounds),
                 (fs::path(dir) / "controls.csv").string());

  auto T = [&](const char* t) { return scoring.activity_index(t); };
  std::vector<ChainTemplate> templates = {
      {"e1", SocProf::employed, 0.45, {T("home"), T("work"), T("home")},
       {8.0 * 3600, 17.0 * 3600}, {0.7 * 3600, 0.8 * 3600}},
      {"e2", SocProf::employed, 0.25, {T("home"), T("work"), T("shopping"), T("home")},
       {8.0 * 3600, 16.5 * 3600, 18.0 * 3600}, {0.7 * 3600, 0.8 * 3600, 0.5 * 3600}},
      {"e3", SocProf::employed, 0.15, {T("home"), T("work"), T("leisure"), T("home")},
       {8.2 * 3600, 17.0 * 3600, 20.5 * 3600}, {0.7 * 3600, 0.8 * 3600, 0.7 * 3600}},
      {"e4", SocProf::employed, 0.15, {T("home"), T("escort"), T("work"), T("home")},
       {7.8 * 3600, 8.3 * 3600, 17.2 * 3600}, {0.4 * 3600, 0.4 * 3600, 0.8 * 3600}},
      {"s1", SocProf::student, 0.6, {T("home"), T("study"), T("home")},
       {7.8 * 3600, 16.2 * 3600}, {0.4 * 3600, 0.6 * 3600}},
      {"s2", SocProf::student, 0.4, {T("home"), T("study"), T("leisure"), T("home")},
       {7.8 * 3600, 16.0 * 3600, 19.0 * 3600}, {0.4 * 3600, 0.6 * 3600, 0.8 * 3600}},
      {"u1", SocProf::under14, 0.7, {T("home"), T("study"), T("home")},
       {8.1 * 3600, 16.3 * 3600}, {0.3 * 3600, 0.4 * 3600}},
      {"u2", SocProf::under14, 0.3, {T("home"), T("study"), T("other"), T("home")},
       {8.1 * 3600, 16.0 * 3600, 18.0 * 3600}, {0.3 * 3600, 0.4 * 3600, 0.6 * 3600}},
      {"r1", SocProf::retired, 0.35, {T("home"), T("shopping"), T("home")},
       {9.8 * 3600, 11.2 * 3600}, {1.0 * 3600, 1.0 * 3600}},
      {"r2", SocProf::retired, 0.2, {T("home"), T("medical"), T("home")},
       {9.5 * 3600, 11.0 * 3600}, {1.2 * 3600, 1.2 * 3600}},
      {"r3", SocProf::retired, 0.25, {T("home"), T("leisure"), T("home")},
       {14.0 * 3600, 16.5 * 3600}, {1.2 * 3600, 1.2 * 3600}},
      {"r4", SocProf::retired, 0.2, {T("home")}, {}, {}},
      {"n1", SocProf::unemployed, 0.3, {T("home"), T("personal"), T("home")},
       {10.0 * 3600, 11.5 * 3600}, {1.2 * 3600, 1.2 * 3600}},
      {"n2", SocProf::unemployed, 0.3, {T("home"), T("shopping"), T("home")},
       {10.5 * 3600, 12.0 * 3600}, {1.2 * 3600, 1.2 * 3600}},
      {"n3", SocProf::unemployed, 0.2, {T("home"), T("leisure"), T("home")},
       {15.0 * 3600, 17.5 * 3600}, {1.5 * 3600, 1.2 * 3600}},
      {"n4", SocProf::unemployed, 0.2, {T("home")}, {}, {}},
      {"h1", SocProf::homemaker, 0.35, {T("home"), T("shopping"), T("home")},
       {9.3 * 3600, 10.8 * 3600}, {0.8 * 3600, 0.8 * 3600}},
      {"h2", SocProf::homemaker, 0.25, {T("home"), T("escort"), T("shopping"), T("home")},
       {8.2 * 3600, 8.7 * 3600, 10.5 * 3600}, {0.3 * 3600, 0.3 * 3600, 0.8 * 3600}},
      {"h3", SocProf::homemaker, 0.2, {T("home"), T("personal"), T("home")},
       {13.5 * 3600, 15.0 * 3600}, {1.0 * 3600, 1.0 * 3600}},
      {"h4", SocProf::homemaker, 0.2, {T("home")}, {}, {}},
  };
  write_chains(templates, scoring.activity_types, (fs::path(dir) / "chains.csv").string());

  // OD rows: work/study/shopping pull toward the center, leisure is uniform,
  // the rest stay local with a uniform remainder
  int cells = g.zones_per_side;
  std::vector<std::string> zone_ids;
  std::vector<double> center_w;
  for (int zr = 0; zr < cells; ++zr)
    for (int zc = 0; zc < cells; ++zc) {
      zone_ids.push_back(grid_zone_id(zr, zc));
      bool edge = zr == 0 || zc == 0 || zr == cells - 1 || zc == cells - 1;
      bool corner = (zr == 0 || zr == cells - 1) && (zc == 0 || zc == cells - 1);
      center_w.push_back(corner ? 1.0 : (edge ? 2.0 : 6.0));
    }
  double center_total = 0;
  for (double w : center_w) center_total += w;

  std::vector<std::tuple<std::string, std::string, std::string, double>> od_rows;
  auto add_center_rows = [&](const char* purpose) {
    for (std::size_t z = 0; z < zone_ids.size(); ++z)
      od_rows.push_back({purpose, "*", zone_ids[z], center_w[z] / center_total});
  };
  add_center_rows("work");
  add_center_rows("study");
  add_center_rows("shopping");
  for (std::size_t z = 0; z < zone_ids.size(); ++z)
    od_rows.push_back({"leisure", "*", zone_ids[z], 1.0 / static_cast<double>(zone_ids.size())});
  for (const char* purpose : {"escort", "personal", "medical", "other"}) {
    for (std::size_t o = 0; o < zone_ids.size(); ++o) {
      double rest = 0.5 / static_cast<double>(zone_ids.size() - 1);
      for (std::size_t d = 0; d < zone_ids.size(); ++d)
        od_rows.push_back({purpose, zone_ids[o], zone_ids[d], o == d ? 0.5 : rest});
    }
  }
  write_od(od_rows, (fs::path(dir) / "od.csv").string());

  // depots: four fixed links at the quarter points of the grid
  Network built = net;  // depots reference the built network's links
  int q = g.nodes_per_side / 4;
  int q3 = (3 * g.nodes_per_side) / 4;
  std::vector<std::string> depots;
  for (auto [r, c] : {std::pair{q, q}, {q, q3}, {q3, q}, {q3, q3}}) {
    NodeIdx nidx = built.node_index("n" + std::to_string(r) + "_" + std::to_string(c));
    depots.push_back(built.links[built.out_links[nidx][0]].id);
  }

  ScenarioConfig c;
  c.iterations = g.iterations;
  c.seed = g.seed;
  c.seed_set = true;
  c.sample_rate = 1.0;
  c.output_dir = "out";
  c.horizon_hours = 48;
  c.scoring = scoring;
  c.fleet_size = g.fleet_size;
  c.fleet_capacity = g.fleet_capacity;
  c.ridesharing = g.ridesharing;
  c.rebalancing = g.rebalancing;
  c.depot_links = depots;
  c.coevolution.iterations = g.iterations;
  c.coevolution.seed = g.seed;
  c.base_dir = dir;
  write_config(c, (fs::path(dir) / "config.json").string());
  return c;
}

}  // namespace savsim
