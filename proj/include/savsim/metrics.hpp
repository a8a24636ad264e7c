#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "savsim/common.hpp"
#include "savsim/events.hpp"
#include "savsim/network.hpp"

#include "json.hpp"

namespace savsim {

struct DistributionStats {
  double mean = 0;
  double p50 = 0;
  double p90 = 0;
  double p95 = 0;
  long count = 0;

  static DistributionStats from(std::vector<double> values) {
    DistributionStats d;
    d.count = static_cast<long>(values.size());
    if (values.empty()) return d;
    double sum = 0;
    for (double v : values) sum += v;
    d.mean = sum / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    auto q = [&](double p) {
      auto idx = static_cast<std::size_t>(p * static_cast<double>(values.size() - 1));
      return values[idx];
    };
    d.p50 = q(0.50);
    d.p90 = q(0.90);
    d.p95 = q(0.95);
    return d;
  }
};

/// Inputs compute_kpis needs beyond the event stream itself.
struct KpiContext {
  const Network* net = nullptr;
  int fleet_size = 0;
  int capacity = 4;
  int home_type = 0;
  int num_act_types = 1;
  double max_wait_s = 900;
  double detour_factor = 1.3;
};

/// Violations of the dispatch guarantees, reconstructed from events. All four
/// counters must be zero in a sound run.
struct ConstraintViolations {
  long wait_over_max = 0;        // served requests with wait > max_wait
  long unflagged_detour = 0;     // rides > detour_factor * tau_d without the penalty flag
  long capacity_exceeded = 0;    // onboard count above seat capacity
  long scheduled_rejected = 0;   // forbidden scheduled -> rejected transitions
};

struct KpiReport {
  std::array<double, 4> modal_split_pct{};  // by Mode; sums to 100
  long total_legs = 0;

  long sav_requests = 0;
  long sav_served = 0;
  long sav_rejected = 0;
  long boardings = 0;
  long alightings = 0;
  double rides_per_sav = 0;

  DistributionStats wait_s;
  DistributionStats in_vehicle_s;
  DistributionStats detour_s;  // realized ivt minus tau_d at submission

  double sav_total_km = 0;
  double sav_empty_km = 0;           // occupancy 0, relocation included
  double sav_relocation_km = 0;
  double empty_distance_ratio = 0;   // empty over total SAV km
  std::vector<double> km_at_occupancy;  // [0..capacity], index = passengers on board
  std::vector<double> pax_occupancy_pct;       // distance-weighted, k >= 1, sums to 100
  std::vector<double> pax_occupancy_time_pct;  // time-weighted alternative
  double pkt_km = 0;  // sum over passengers of onboard network km
  double evk_km = 0;  // = sav_empty_km

  std::vector<double> in_service_rate;  // per hour of the simulated horizon
  double in_service_rate_mean = 0;

  double car_km = 0;
  double total_driven_km = 0;  // car + SAV

  double per_vehicle_km_mean = 0;
  double per_vehicle_km_max = 0;

  // trip counts by (origin activity type, destination activity type)
  std::vector<std::vector<long>> od_activity_counts;

  ConstraintViolations violations;
  int stranded_open_traversals = 0;
  Time horizon = 0;
};

namespace detail {

struct VehKpiState {
  int onboard = 0;
  double km_by_occ[16] = {};
  double s_by_occ[16] = {};
  double km = 0;
  double relocation_km = 0;
  Time link_entered = -1;
  bool in_task = false;
  bool task_is_relocation = false;
  bool next_task_relocation = false;
  Time task_started = 0;
  long boardings = 0;
  long alightings = 0;
};

struct ReqKpiState {
  Time submitted = -1;
  double tau_d = 0;
  bool flagged = false;
  bool scheduled = false;
  bool rejected = false;
  Time picked_up = -1;
  Time dropped_off = -1;
};

}  // namespace detail

/// Single-pass fold of one day's event stream into the full KPI report, with
/// per-vehicle occupancy reconstruction.
inline KpiReport compute_kpis(const EventStream& events, const KpiContext& ctx) {
  KpiReport rep;
  const Network& net = *ctx.net;
  int occ_cap = 15;

  std::map<std::int64_t, detail::VehKpiState> sav;  // by fleet index
  std::map<std::int64_t, Time> car_entered;         // by raw vehicle ref
  std::map<std::int64_t, detail::ReqKpiState> reqs;
  std::map<std::int64_t, int> person_last_act;      // last act_end tag per person
  std::map<std::int64_t, int> open_sav_trip_origin; // depart(sav) seen, origin act type
  std::vector<std::pair<int, std::int64_t>> pending_dest;  // (origin type, person) awaiting next act_end

  rep.od_activity_counts.assign(static_cast<std::size_t>(ctx.num_act_types),
                                std::vector<long>(static_cast<std::size_t>(ctx.num_act_types), 0));
  auto hour_buckets = std::vector<double>{};

  auto add_service_time = [&](Time from, Time to) {
    for (Time t = from; t < to;) {
      Time hour_end = (t / kSecondsPerHour + 1) * kSecondsPerHour;
      Time upto = std::min(to, hour_end);
      std::size_t h = static_cast<std::size_t>(t / kSecondsPerHour);
      if (hour_buckets.size() <= h) hour_buckets.resize(h + 1, 0);
      hour_buckets[h] += static_cast<double>(upto - t);
      t = upto;
    }
  };

  for (const Event& e : events) {
    switch (e.kind) {
      case EventKind::act_end: {
        person_last_act[e.person] = e.tag;
        // resolve pending SAV trip destinations for this person
        for (auto& [origin, person] : pending_dest) {
          if (person == e.person) {
            rep.od_activity_counts[static_cast<std::size_t>(origin)][static_cast<std::size_t>(e.tag)] += 1;
            person = -1;
          }
        }
        break;
      }
      case EventKind::depart:
        rep.total_legs += 1;
        if (e.tag >= 0) rep.modal_split_pct[static_cast<std::size_t>(e.tag)] += 1;
        if (e.tag == static_cast<std::int16_t>(Mode::sav))
          open_sav_trip_origin[e.person] = person_last_act.count(e.person)
                                               ? person_last_act[e.person]
                                               : ctx.home_type;
        break;
      case EventKind::person_arrives:
        if (e.tag == static_cast<std::int16_t>(Mode::sav)) {
          auto it = open_sav_trip_origin.find(e.person);
          if (it != open_sav_trip_origin.end()) {
            pending_dest.push_back({it->second, e.person});
            open_sav_trip_origin.erase(it);
          }
        }
        break;
      case EventKind::request_submitted: {
        auto& r = reqs[e.request];
        r.submitted = e.time;
        r.tau_d = e.value;
        rep.sav_requests += 1;
        break;
      }
      case EventKind::request_scheduled: {
        auto& r = reqs[e.request];
        r.scheduled = true;
        r.flagged = e.value > 0.5;
        // a scheduled vehicle on a relocation drive switches to service duty
        if (e.vehicle.is_sav()) {
          auto& v = sav[e.vehicle.sav_index()];
          if (v.in_task && v.task_is_relocation) {
            v.task_is_relocation = false;
            v.task_started = e.time;  // service span starts at the diversion
          }
        }
        break;
      }
      case EventKind::request_rejected: {
        auto& r = reqs[e.request];
        if (r.scheduled) rep.violations.scheduled_rejected += 1;
        r.rejected = true;
        rep.sav_rejected += 1;
        break;
      }
      case EventKind::passenger_pickup: {
        auto& r = reqs[e.request];
        r.picked_up = e.time;
        auto& v = sav[e.vehicle.sav_index()];
        v.onboard += 1;
        v.boardings += 1;
        rep.boardings += 1;
        if (v.onboard > ctx.capacity) rep.violations.capacity_exceeded += 1;
        break;
      }
      case EventKind::passenger_dropoff: {
        auto& r = reqs[e.request];
        r.dropped_off = e.time;
        auto& v = sav[e.vehicle.sav_index()];
        if (v.onboard == 0) throw InvariantViolation("dropoff without matching pickup");
        v.onboard -= 1;
        v.alightings += 1;
        rep.alightings += 1;
        break;
      }
      case EventKind::relocation_start:
        sav[e.vehicle.sav_index()].next_task_relocation = true;
        break;
      case EventKind::task_start: {
        auto& v = sav[e.vehicle.sav_index()];
        v.in_task = true;
        v.task_is_relocation = v.next_task_relocation;
        v.next_task_relocation = false;
        v.task_started = e.time;
        break;
      }
      case EventKind::task_end: {
        auto& v = sav[e.vehicle.sav_index()];
        if (v.in_task && !v.task_is_relocation) add_service_time(v.task_started, e.time);
        v.in_task = false;
        v.task_is_relocation = false;
        break;
      }
      case EventKind::link_enter:
        if (e.vehicle.is_sav())
          sav[e.vehicle.sav_index()].link_entered = e.time;
        else
          car_entered[e.vehicle.raw] = e.time;
        break;
      case EventKind::link_leave: {
        double km = net.links[static_cast<std::size_t>(e.link)].length_m / 1000.0;
        if (e.vehicle.is_sav()) {
          auto& v = sav[e.vehicle.sav_index()];
          int k = std::min(v.onboard, occ_cap);
          v.km_by_occ[k] += km;
          v.s_by_occ[k] += static_cast<double>(e.time - v.link_entered);
          v.km += km;
          if (v.in_task && v.task_is_relocation) v.relocation_km += km;
        } else {
          rep.car_km += km;
          car_entered.erase(e.vehicle.raw);
        }
        break;
      }
    }
  }

  // unresolved SAV destinations: plans end at home
  for (auto& [origin, person] : pending_dest)
    if (person != -1)
      rep.od_activity_counts[static_cast<std::size_t>(origin)][static_cast<std::size_t>(ctx.home_type)] += 1;

  rep.horizon = events.size() ? events[events.size() - 1].time : 0;

  // modal split percentages
  if (rep.total_legs > 0)
    for (double& v : rep.modal_split_pct) v = 100.0 * v / static_cast<double>(rep.total_legs);

  // per-request statistics and constraint checks
  std::vector<double> waits, ivts, detours;
  for (const auto& [rid, r] : reqs) {
    if (r.picked_up < 0) continue;
    rep.sav_served += 1;
    double wait = static_cast<double>(r.picked_up - r.submitted);
    waits.push_back(wait);
    if (wait > ctx.max_wait_s) rep.violations.wait_over_max += 1;
    if (r.dropped_off >= 0) {
      double ivt = static_cast<double>(r.dropped_off - r.picked_up);
      ivts.push_back(ivt);
      detours.push_back(ivt - r.tau_d);
      if (!r.flagged && ivt > ctx.detour_factor * r.tau_d + 1e-9)
        rep.violations.unflagged_detour += 1;
    }
  }
  rep.wait_s = DistributionStats::from(std::move(waits));
  rep.in_vehicle_s = DistributionStats::from(std::move(ivts));
  rep.detour_s = DistributionStats::from(std::move(detours));

  // vehicle aggregates
  rep.km_at_occupancy.assign(static_cast<std::size_t>(ctx.capacity) + 1, 0.0);
  std::vector<double> s_at_occupancy(static_cast<std::size_t>(ctx.capacity) + 1, 0.0);
  double km_max = 0, km_sum = 0;
  for (const auto& [vid, v] : sav) {
    if (v.onboard != 0) throw InvariantViolation("vehicle ends the day with passengers on board");
    for (int k = 0; k <= occ_cap; ++k) {
      int kk = std::min(k, ctx.capacity);
      rep.km_at_occupancy[static_cast<std::size_t>(kk)] += v.km_by_occ[k];
      s_at_occupancy[static_cast<std::size_t>(kk)] += v.s_by_occ[k];
      if (k >= 1) rep.pkt_km += k * v.km_by_occ[k];
    }
    rep.sav_total_km += v.km;
    rep.sav_relocation_km += v.relocation_km;
    km_sum += v.km;
    km_max = std::max(km_max, v.km);
  }
  rep.sav_empty_km = rep.km_at_occupancy.empty() ? 0 : rep.km_at_occupancy[0];
  rep.evk_km = rep.sav_empty_km;
  rep.empty_distance_ratio = rep.sav_total_km > 0 ? rep.sav_empty_km / rep.sav_total_km : 0;
  rep.per_vehicle_km_mean = ctx.fleet_size > 0 ? km_sum / ctx.fleet_size : 0;
  rep.per_vehicle_km_max = km_max;
  rep.rides_per_sav =
      ctx.fleet_size > 0 ? static_cast<double>(rep.boardings) / ctx.fleet_size : 0;
  rep.total_driven_km = rep.car_km + rep.sav_total_km;

  double occupied_km = 0, occupied_s = 0;
  for (std::size_t k = 1; k < rep.km_at_occupancy.size(); ++k) {
    occupied_km += rep.km_at_occupancy[k];
    occupied_s += s_at_occupancy[k];
  }
  rep.pax_occupancy_pct.assign(rep.km_at_occupancy.size(), 0.0);
  rep.pax_occupancy_time_pct.assign(rep.km_at_occupancy.size(), 0.0);
  for (std::size_t k = 1; k < rep.km_at_occupancy.size(); ++k) {
    if (occupied_km > 0) rep.pax_occupancy_pct[k] = 100.0 * rep.km_at_occupancy[k] / occupied_km;
    if (occupied_s > 0) rep.pax_occupancy_time_pct[k] = 100.0 * s_at_occupancy[k] / occupied_s;
  }

  // hourly in-service rates over the full horizon
  std::size_t hours = static_cast<std::size_t>(rep.horizon / kSecondsPerHour) + 1;
  if (hour_buckets.size() < hours) hour_buckets.resize(hours, 0);
  rep.in_service_rate.assign(hour_buckets.size(), 0);
  double service_total = 0;
  for (std::size_t h = 0; h < hour_buckets.size(); ++h) {
    rep.in_service_rate[h] =
        ctx.fleet_size > 0 ? hour_buckets[h] / (static_cast<double>(ctx.fleet_size) * kSecondsPerHour) : 0;
    service_total += hour_buckets[h];
  }
  rep.in_service_rate_mean =
      ctx.fleet_size > 0 && rep.horizon > 0
          ? service_total / (static_cast<double>(ctx.fleet_size) * static_cast<double>(rep.horizon))
          : 0;

  if (rep.boardings != rep.alightings)
    throw InvariantViolation("boardings do not balance alightings");

  return rep;
}

// ---------------------------------------------------------------------------
// serialization

inline nlohmann::json distribution_json(const DistributionStats& d) {
  return {{"mean", d.mean}, {"p50", d.p50}, {"p90", d.p90}, {"p95", d.p95}, {"count", d.count}};
}

inline nlohmann::json kpi_to_json(const KpiReport& r) {
  nlohmann::json j;
  j["modal_split_pct"] = {{"car", r.modal_split_pct[0]},
                          {"pt", r.modal_split_pct[1]},
                          {"walk", r.modal_split_pct[2]},
                          {"sav", r.modal_split_pct[3]}};
  j["total_legs"] = r.total_legs;
  j["sav"] = {{"requests", r.sav_requests},
              {"served", r.sav_served},
              {"rejected", r.sav_rejected},
              {"boardings", r.boardings},
              {"alightings", r.alightings},
              {"rides_per_sav", r.rides_per_sav}};
  j["wait_s"] = distribution_json(r.wait_s);
  j["in_vehicle_s"] = distribution_json(r.in_vehicle_s);
  j["detour_s"] = distribution_json(r.detour_s);
  j["distance"] = {{"sav_total_km", r.sav_total_km},
                   {"sav_empty_km", r.sav_empty_km},
                   {"sav_relocation_km", r.sav_relocation_km},
                   {"empty_distance_ratio", r.empty_distance_ratio},
                   {"pkt_km", r.pkt_km},
                   {"evk_km", r.evk_km},
                   {"car_km", r.car_km},
                   {"total_driven_km", r.total_driven_km},
                   {"per_vehicle_km_mean", r.per_vehicle_km_mean},
                   {"per_vehicle_km_max", r.per_vehicle_km_max},
                   {"km_at_occupancy", r.km_at_occupancy}};
  j["pax_occupancy_pct"] = r.pax_occupancy_pct;
  j["pax_occupancy_time_pct"] = r.pax_occupancy_time_pct;
  j["in_service_rate"] = r.in_service_rate;
  j["in_service_rate_mean"] = r.in_service_rate_mean;
  j["od_activity_counts"] = r.od_activity_counts;
  j["violations"] = {{"wait_over_max", r.violations.wait_over_max},
                     {"unflagged_detour", r.violations.unflagged_detour},
                     {"capacity_exceeded", r.violations.capacity_exceeded},
                     {"scheduled_rejected", r.violations.scheduled_rejected}};
  j["horizon_s"] = r.horizon;
  return j;
}

/// Flat kpi.csv columns shared by single runs and sweep aggregation.
inline std::vector<std::string> kpi_csv_header() {
  return {"scenario",      "fleet_size",         "capacity",        "ridesharing",
          "rebalancing",   "share_car",          "share_pt",        "share_walk",
          "share_sav",     "sav_requests",       "sav_served",      "sav_rejected",
          "rides_per_sav", "wait_mean_s",        "ivt_mean_s",      "detour_mean_s",
          "sav_total_km",  "sav_empty_km",       "empty_ratio",     "pkt_km",
          "evk_km",        "car_km",             "total_driven_km", "in_service_mean",
          "veh_km_mean",   "veh_km_max",         "occ1_pct",        "occ2_pct",
          "occ3_pct",      "occ4_pct",           "occ5_pct",        "occ6_pct"};
}

inline std::vector<std::string> kpi_csv_row(const std::string& scenario, int fleet, int capacity,
                                            bool ridesharing, bool rebalancing,
                                            const KpiReport& r) {
  auto f = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  std::vector<std::string> row = {scenario,
                                  std::to_string(fleet),
                                  std::to_string(capacity),
                                  ridesharing ? "1" : "0",
                                  rebalancing ? "1" : "0",
                                  f(r.modal_split_pct[0]),
                                  f(r.modal_split_pct[1]),
                                  f(r.modal_split_pct[2]),
                                  f(r.modal_split_pct[3]),
                                  std::to_string(r.sav_requests),
                                  std::to_string(r.sav_served),
                                  std::to_string(r.sav_rejected),
                                  f(r.rides_per_sav),
                                  f(r.wait_s.mean),
                                  f(r.in_vehicle_s.mean),
                                  f(r.detour_s.mean),
                                  f(r.sav_total_km),
                                  f(r.sav_empty_km),
                                  f(r.empty_distance_ratio),
                                  f(r.pkt_km),
                                  f(r.evk_km),
                                  f(r.car_km),
                                  f(r.total_driven_km),
                                  f(r.in_service_rate_mean),
                                  f(r.per_vehicle_km_mean),
                                  f(r.per_vehicle_km_max)};
  for (std::size_t k = 1; k <= 6; ++k)
    row.push_back(f(k < r.pax_occupancy_pct.size() ? r.pax_occupancy_pct[k] : 0));
  return row;
}

// ---------------------------------------------------------------------------
// trend comparison

struct TrendFinding {
  std::string name;
  bool pass = false;
  double value = 0;  // the quantity the verdict is about (inversion size, % change, ...)
  std::string detail;
};

/// Verdict for "values are nondecreasing along the sweep, allowing at most
/// `max_inversions` dips of at most `tolerance` each".
inline TrendFinding nondecreasing_verdict(const std::string& name, const std::vector<double>& values,
                                          double tolerance = 0, int max_inversions = 0) {
  TrendFinding f{name, true, 0, ""};
  int inversions = 0;
  double worst = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    double dip = values[i - 1] - values[i];
    if (dip > 1e-12) {
      inversions += 1;
      worst = std::max(worst, dip);
    }
  }
  f.value = worst;
  f.pass = inversions <= max_inversions && worst <= tolerance + 1e-12;
  f.detail = "inversions=" + std::to_string(inversions) + " worst_dip=" + std::to_string(worst);
  return f;
}

/// Verdict for "enabling X decreased the metric by at least min_decrease_pct".
inline TrendFinding decrease_verdict(const std::string& name, double before, double after,
                                     double min_decrease_pct) {
  TrendFinding f{name, false, 0, ""};
  double change = before > 0 ? 100.0 * (before - after) / before : 0;
  f.value = change;
  f.pass = change >= min_decrease_pct;
  f.detail = "before=" + std::to_string(before) + " after=" + std::to_string(after) +
             " decrease=" + std::to_string(change) + "%";
  return f;
}

inline TrendFinding increase_verdict(const std::string& name, double before, double after) {
  TrendFinding f{name, after > before, after - before,
                 "before=" + std::to_string(before) + " after=" + std::to_string(after)};
  return f;
}

/// The §-style trend battery over a fleet-size sweep plus optional
/// rebalancing and individual-ride comparison points.
struct SweepReports {
  std::vector<std::pair<double, KpiReport>> fleet_sweep;  // (fleet size, report), ridesharing
  std::vector<std::pair<double, KpiReport>> individual;   // same fleet axis, non-ridesharing
  const KpiReport* rebalancing_off = nullptr;
  const KpiReport* rebalancing_on = nullptr;
};

inline std::vector<TrendFinding> trend_compare(const SweepReports& sweep) {
  std::vector<TrendFinding> findings;
  if (sweep.fleet_sweep.size() >= 2) {
    std::vector<double> shares;
    for (const auto& [fleet, rep] : sweep.fleet_sweep)
      shares.push_back(rep.modal_split_pct[static_cast<std::size_t>(Mode::sav)]);
    findings.push_back(nondecreasing_verdict("sav_share_vs_fleet", shares, 0.2, 1));
  }
  if (!sweep.individual.empty() && !sweep.fleet_sweep.empty()) {
    bool all_le = true;
    double worst = 0;
    for (const auto& [fleet, ind] : sweep.individual) {
      for (const auto& [fleet2, shared] : sweep.fleet_sweep) {
        if (fleet2 != fleet) continue;
        double excess = shared.total_driven_km - ind.total_driven_km;
        worst = std::max(worst, excess);
        if (excess > 1e-9) all_le = false;
      }
    }
    findings.push_back({"ridesharing_vkt_le_individual", all_le, worst,
                        "worst_excess_km=" + std::to_string(worst)});
  }
  if (sweep.rebalancing_off && sweep.rebalancing_on) {
    findings.push_back(decrease_verdict("rebalancing_wait_decrease",
                                        sweep.rebalancing_off->wait_s.mean,
                                        sweep.rebalancing_on->wait_s.mean, 10.0));
    findings.push_back(increase_verdict("rebalancing_empty_ratio_increase",
                                        sweep.rebalancing_off->empty_distance_ratio,
                                        sweep.rebalancing_on->empty_distance_ratio));
  }
  return findings;
}

}  // namespace savsim
