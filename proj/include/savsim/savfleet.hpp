#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "savsim/common.hpp"
#include "savsim/mincostflow.hpp"
#include "savsim/network.hpp"
#include "savsim/router.hpp"

namespace savsim {

enum class RequestStatus : std::uint8_t { submitted, scheduled, picked_up, completed, rejected };

/// One SAV trip demand. Direct time/distance are router estimates frozen at
/// submission; they anchor the detour constraint and the fare.
struct Request {
  RequestIdx idx = kInvalidIdx;
  PersonIdx person = kInvalidIdx;
  LinkIdx origin = kInvalidIdx;
  LinkIdx destination = kInvalidIdx;
  Time submitted = 0;
  double direct_time_s = 0;    // tau_d
  double direct_distance_m = 0;  // d_d
  RequestStatus status = RequestStatus::submitted;
  bool extended_detour = false;  // admitted under the extended tier; ride unbounded but penalized
  VehicleIdx vehicle = kInvalidIdx;
  Time picked_up_at = -1;
  Time dropped_off_at = -1;
};

struct DispatchParams {
  double detour_factor = 1.3;    // ride time <= detour_factor * tau_d
  double max_wait_s = 900;
  bool extended_tier = true;     // allow ride > detour cap while wait <= max_wait, with penalty
  double stop_seconds = 60;
  double time_buffer_s = 0;      // conservatism added to estimated times in feasibility checks
};

struct RebalanceParams {
  double cell_meters = 1000;
  Time interval_s = 300;
  Time idle_threshold_s = 600;
  Time demand_horizon_s = 3600;
};

/// A planned service stop: board/alight the listed requests at `link`.
struct StopPlan {
  LinkIdx link = kInvalidIdx;
  std::vector<RequestIdx> pickups;
  std::vector<RequestIdx> dropoffs;
};

enum class VehiclePhase : std::uint8_t { idle, driving, stopping };

/// A fleet vehicle: static configuration plus the runtime state the mobsim
/// executes. The dispatcher mutates only `stops` / `relocating` /
/// `reroute_needed`; everything else is owned by the mobsim.
struct SavVehicle {
  VehicleIdx idx = 0;
  int capacity = 4;
  LinkIdx start_link = kInvalidIdx;

  VehiclePhase phase = VehiclePhase::idle;
  LinkIdx cur_link = kInvalidIdx;
  Time link_entered = 0;
  Time idle_since = 0;
  Time stop_until = 0;
  std::optional<StopPlan> active_stop;
  std::vector<StopPlan> stops;   // pending stops, front served next
  std::vector<RequestIdx> onboard;
  bool relocating = false;
  LinkIdx relocation_target = kInvalidIdx;
  bool reroute_needed = false;   // target changed while driving; re-path at next link boundary

  // driving state
  std::vector<LinkIdx> drive_path;
  std::size_t path_pos = 0;
  bool on_network = false;  // currently traversing drive_path[path_pos]

  double driven_m = 0;

  bool is_unengaged() const {
    return onboard.empty() && stops.empty() && !(active_stop && !active_stop->pickups.empty());
  }
};

/// Splits `fleet_size` vehicles as evenly as possible across the depot links;
/// the remainder goes to the lowest depot indices. All vehicles start idle at
/// their depot (no warm start).
inline std::vector<SavVehicle> seed_fleet(int fleet_size, int capacity,
                                          const std::vector<LinkIdx>& depots) {
  if (depots.empty()) throw ConfigError("seed_fleet: no depots configured");
  std::vector<SavVehicle> fleet;
  fleet.reserve(static_cast<std::size_t>(fleet_size));
  int base = fleet_size / static_cast<int>(depots.size());
  int extra = fleet_size % static_cast<int>(depots.size());
  VehicleIdx next = 0;
  for (std::size_t d = 0; d < depots.size(); ++d) {
    int count = base + (static_cast<int>(d) < extra ? 1 : 0);
    for (int k = 0; k < count; ++k) {
      SavVehicle v;
      v.idx = next++;
      v.capacity = capacity;
      v.start_link = depots[d];
      v.cur_link = depots[d];
      fleet.push_back(std::move(v));
    }
  }
  return fleet;
}

/// Estimated timeline of a stop sequence: the vehicle leaves its release
/// point, drives stop to stop without slack, and dwells `stop_seconds` at
/// each stop. Passengers board at stop end and alight at stop begin.
struct StopChain {
  std::vector<double> arrive;  // stop begin
  std::vector<double> depart;  // stop end
  double last_end = 0;         // release time when the sequence is empty
};

class Dispatcher {
 public:
  Dispatcher(const Network& net, const TravelTimeOracle& oracle, const TravelTimeProfile& profile,
             DispatchParams params, bool ridesharing)
      : net_(&net), oracle_(&oracle), profile_(&profile), params_(params),
        ridesharing_(ridesharing) {}

  const DispatchParams& params() const { return params_; }

  struct Insertion {
    VehicleIdx vehicle = kInvalidIdx;
    std::size_t pickup_pos = 0;   // insert pickup before stops[pickup_pos]
    std::size_t dropoff_pos = 0;  // insert dropoff before stops[dropoff_pos] (after the pickup)
    double delta_work = 0;
    bool flagged = false;  // admitted via the extended-detour tier
    double est_wait = 0;
    double est_ride = 0;
  };

  /// Where and when a vehicle can start serving new work: idle vehicles are
  /// available now at their link; stopping vehicles when the dwell ends;
  /// driving vehicles once they clear their current link (diversions take
  /// effect at link boundaries).
  std::pair<double, LinkIdx> release_point(const SavVehicle& v, double now) const {
    switch (v.phase) {
      case VehiclePhase::idle:
        return {now, v.cur_link};
      case VehiclePhase::stopping:
        return {std::max(now, static_cast<double>(v.stop_until)), v.cur_link};
      case VehiclePhase::driving: {
        double exit = static_cast<double>(v.link_entered) +
                      profile_->link_time(*net_, v.cur_link, static_cast<double>(v.link_entered));
        if (!v.on_network) exit = now;  // not yet on a link; diverts immediately
        return {std::max(now, exit), v.cur_link};
      }
    }
    return {now, v.cur_link};
  }

  StopChain chain_times(const SavVehicle& v, const std::vector<StopPlan>& stops, double now) const {
    auto [release, pos] = release_point(v, now);
    StopChain c;
    c.last_end = release;
    double t = release;
    LinkIdx at = pos;
    for (const StopPlan& s : stops) {
      t += oracle_->link_to_link(at, s.link, t);
      c.arrive.push_back(t);
      t += params_.stop_seconds;
      c.depart.push_back(t);
      at = s.link;
    }
    if (!stops.empty()) c.last_end = t;
    return c;
  }

  /// Scans every vehicle and every (pickup, dropoff) position pair in id /
  /// position order and keeps the first feasible insertion with the smallest
  /// increase of vehicle work time (total drive + stop time).
  std::optional<Insertion> find_best_insertion(const Request& req,
                                               const std::vector<SavVehicle>& fleet,
                                               const std::vector<Request>& requests,
                                               double now) const {
    std::optional<Insertion> best;
    for (const SavVehicle& v : fleet) {
      if (!ridesharing_ && !v.is_unengaged()) continue;
      double base_work = chain_times(v, v.stops, now).last_end;
      std::size_t n = v.stops.size();
      for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = i; j <= n; ++j) {
          auto cand = evaluate(req, v, requests, now, i, j, base_work);
          if (!cand) continue;
          if (!best || cand->delta_work < best->delta_work) best = cand;
        }
      }
    }
    return best;
  }

  /// Feasibility and cost of inserting `req`'s pickup at position i and
  /// dropoff at position j into vehicle v's pending stops.
  std::optional<Insertion> evaluate(const Request& req, const SavVehicle& v,
                                    const std::vector<Request>& requests, double now,
                                    std::size_t i, std::size_t j, double base_work) const {
    std::vector<StopPlan> stops = with_insertion(v.stops, req, i, j);
    StopChain chain = chain_times(v, stops, now);

    // capacity along every segment: onboard set changes only at stops
    int count = static_cast<int>(v.onboard.size());
    for (std::size_t k = 0; k < stops.size(); ++k) {
      count -= static_cast<int>(stops[k].dropoffs.size());
      count += static_cast<int>(stops[k].pickups.size());
      if (count > v.capacity) return std::nullopt;
    }

    double buffer = params_.time_buffer_s;
    std::optional<Insertion> out = Insertion{v.idx, i, j, 0, false, 0, 0};

    // locate each affected request's pickup end / dropoff begin in the chain
    for (std::size_t k = 0; k < stops.size(); ++k) {
      for (RequestIdx rid : stops[k].pickups) {
        const Request& r = (rid == req.idx) ? req : requests[rid];
        double wait = chain.depart[k] + buffer - static_cast<double>(r.submitted);
        if (wait > params_.max_wait_s) return std::nullopt;
        double ride = ride_time(rid, req, stops, chain, k) + buffer;
        if (rid == req.idx) {
          out->est_wait = wait;
          out->est_ride = ride;
          if (ride > params_.detour_factor * r.direct_time_s) {
            if (!params_.extended_tier) return std::nullopt;
            out->flagged = true;  // wait bound already holds
          }
        } else if (!r.extended_detour && ride > params_.detour_factor * r.direct_time_s) {
          return std::nullopt;
        }
      }
      for (RequestIdx rid : stops[k].dropoffs) {
        if (rid == req.idx) continue;
        const Request& r = requests[rid];
        if (r.status != RequestStatus::picked_up) continue;  // handled via pickups otherwise
        if (r.extended_detour) continue;
        double ride = chain.arrive[k] + buffer - static_cast<double>(r.picked_up_at);
        if (ride > params_.detour_factor * r.direct_time_s) return std::nullopt;
      }
    }

    out->delta_work = chain.last_end - base_work;
    return out;
  }

  static std::vector<StopPlan> with_insertion(const std::vector<StopPlan>& stops,
                                              const Request& req, std::size_t i, std::size_t j) {
    std::vector<StopPlan> out;
    out.reserve(stops.size() + 2);
    for (std::size_t k = 0; k <= stops.size(); ++k) {
      if (k == i) out.push_back({req.origin, {req.idx}, {}});
      if (k == j) out.push_back({req.destination, {}, {req.idx}});
      if (k < stops.size()) out.push_back(stops[k]);
    }
    return out;
  }

 private:
  double ride_time(RequestIdx rid, const Request& req, const std::vector<StopPlan>& stops,
                   const StopChain& chain, std::size_t pickup_k) const {
    const Request* r = (rid == req.idx) ? &req : nullptr;
    for (std::size_t m = pickup_k; m < stops.size(); ++m) {
      for (RequestIdx d : stops[m].dropoffs) {
        if (d == rid) return chain.arrive[m] - chain.depart[pickup_k];
      }
    }
    (void)r;
    throw InvariantViolation("request has a pickup but no dropoff stop");
  }

  const Network* net_;
  const TravelTimeOracle* oracle_;
  const TravelTimeProfile* profile_;
  DispatchParams params_;
  bool ridesharing_;
};

/// Square-cell aggregation grid over the network's bounding box, used for
/// demand estimation and rebalancing.
class CellGrid {
 public:
  CellGrid(const Network& net, double cell_meters) : cell_m_(cell_meters) {
    double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
    double max_x = -min_x, max_y = -min_x;
    for (const Node& n : net.nodes) {
      min_x = std::min(min_x, n.x);
      min_y = std::min(min_y, n.y);
      max_x = std::max(max_x, n.x);
      max_y = std::max(max_y, n.y);
    }
    origin_x_ = min_x;
    origin_y_ = min_y;
    cols_ = std::max(1, static_cast<int>(std::floor((max_x - origin_x_) / cell_m_)) + 1);
    rows_ = std::max(1, static_cast<int>(std::floor((max_y - origin_y_) / cell_m_)) + 1);

    link_cell_.reserve(net.links.size());
    std::vector<double> best_dist(static_cast<std::size_t>(rows_ * cols_),
                                  std::numeric_limits<double>::infinity());
    central_link_.assign(static_cast<std::size_t>(rows_ * cols_), kInvalidIdx);
    for (LinkIdx l = 0; l < net.links.size(); ++l) {
      const Node& a = net.nodes[net.links[l].from];
      const Node& b = net.nodes[net.links[l].to];
      double mx = (a.x + b.x) / 2, my = (a.y + b.y) / 2;
      int cell = cell_of(mx, my);
      link_cell_.push_back(cell);
      auto [cx, cy] = centroid(cell);
      double d = (mx - cx) * (mx - cx) + (my - cy) * (my - cy);
      if (d < best_dist[static_cast<std::size_t>(cell)]) {
        best_dist[static_cast<std::size_t>(cell)] = d;
        central_link_[static_cast<std::size_t>(cell)] = l;
      }
    }
  }

  int num_cells() const { return rows_ * cols_; }
  int cell_of_link(LinkIdx l) const { return link_cell_[l]; }
  LinkIdx central_link(int cell) const { return central_link_[static_cast<std::size_t>(cell)]; }

  std::pair<double, double> centroid(int cell) const {
    int r = cell / cols_, c = cell % cols_;
    return {origin_x_ + (c + 0.5) * cell_m_, origin_y_ + (r + 0.5) * cell_m_};
  }

  double centroid_distance(int a, int b) const {
    auto [ax, ay] = centroid(a);
    auto [bx, by] = centroid(b);
    return std::hypot(ax - bx, ay - by);
  }

 private:
  int cell_of(double x, double y) const {
    int c = std::clamp(static_cast<int>(std::floor((x - origin_x_) / cell_m_)), 0, cols_ - 1);
    int r = std::clamp(static_cast<int>(std::floor((y - origin_y_) / cell_m_)), 0, rows_ - 1);
    return r * cols_ + c;
  }

  double cell_m_;
  double origin_x_ = 0, origin_y_ = 0;
  int rows_ = 1, cols_ = 1;
  std::vector<int> link_cell_;
  std::vector<LinkIdx> central_link_;
};

/// Expected request counts per cell over [now, now + horizon), based on the
/// previous iteration's submissions. The first iteration has no history and
/// yields an all-zero estimate.
class DemandEstimator {
 public:
  DemandEstimator(int num_cells) : by_cell_(static_cast<std::size_t>(num_cells)) {}

  void add_history(Time t_sub, int cell) { by_cell_[static_cast<std::size_t>(cell)].push_back(t_sub); }

  void finalize() {
    for (auto& v : by_cell_) std::sort(v.begin(), v.end());
  }

  std::vector<int> estimate(Time now, Time horizon_s) const {
    std::vector<int> out(by_cell_.size(), 0);
    for (std::size_t c = 0; c < by_cell_.size(); ++c) {
      const auto& ts = by_cell_[c];
      auto lo = std::lower_bound(ts.begin(), ts.end(), now);
      auto hi = std::lower_bound(ts.begin(), ts.end(), now + horizon_s);
      out[c] = static_cast<int>(hi - lo);
    }
    return out;
  }

 private:
  std::vector<std::vector<Time>> by_cell_;
};

struct RelocationAssignment {
  VehicleIdx vehicle;
  int target_cell;
  LinkIdx target_link;
};

/// Solves the idle-vehicle transportation problem: supplies are eligible idle
/// vehicles per cell, demands are per-cell deficits truncated to the total
/// supply, arc costs are beeline centroid distances. Vehicles already inside
/// a deficit cell stay put via the zero-cost self arc.
inline std::vector<RelocationAssignment> rebalance(
    const std::vector<SavVehicle>& fleet, const std::vector<int>& demand_estimate,
    const RebalanceParams& params, const CellGrid& grid, Time now) {
  int nc = grid.num_cells();
  std::vector<std::vector<VehicleIdx>> eligible(static_cast<std::size_t>(nc));
  std::vector<int> idle_count(static_cast<std::size_t>(nc), 0);
  for (const SavVehicle& v : fleet) {
    if (v.phase == VehiclePhase::idle && v.stops.empty() && v.onboard.empty()) {
      int cell = grid.cell_of_link(v.cur_link);
      idle_count[static_cast<std::size_t>(cell)] += 1;
      if (now - v.idle_since >= params.idle_threshold_s)
        eligible[static_cast<std::size_t>(cell)].push_back(v.idx);
    } else if (v.relocating) {
      // vehicles already heading to a cell count toward its cover
      idle_count[static_cast<std::size_t>(grid.cell_of_link(v.relocation_target))] += 1;
    }
  }

  std::vector<int> supply_cells, deficit_cells;
  std::vector<int> deficit(static_cast<std::size_t>(nc), 0);
  int total_supply = 0, total_deficit = 0;
  for (int c = 0; c < nc; ++c) {
    if (!eligible[static_cast<std::size_t>(c)].empty()) {
      supply_cells.push_back(c);
      total_supply += static_cast<int>(eligible[static_cast<std::size_t>(c)].size());
    }
    int d = std::max(0, demand_estimate[static_cast<std::size_t>(c)] -
                            idle_count[static_cast<std::size_t>(c)]);
    if (d > 0 && grid.central_link(c) != kInvalidIdx) {
      deficit[static_cast<std::size_t>(c)] = d;
      deficit_cells.push_back(c);
      total_deficit += d;
    }
  }
  if (total_supply == 0 || total_deficit == 0) return {};

  // node layout: 0 = source, 1..S = supply cells, S+1..S+D = deficit cells, S+D+1 = sink
  int ns = static_cast<int>(supply_cells.size());
  int nd = static_cast<int>(deficit_cells.size());
  MinCostFlow mcf(ns + nd + 2);
  int source = 0, sink = ns + nd + 1;
  for (int s = 0; s < ns; ++s)
    mcf.add_edge(source, 1 + s,
                 static_cast<int>(eligible[static_cast<std::size_t>(supply_cells[static_cast<std::size_t>(s)])].size()), 0);
  for (int s = 0; s < ns; ++s)
    for (int d = 0; d < nd; ++d)
      mcf.add_edge(1 + s, 1 + ns + d, std::numeric_limits<int>::max() / 2,
                   grid.centroid_distance(supply_cells[static_cast<std::size_t>(s)],
                                          deficit_cells[static_cast<std::size_t>(d)]));
  for (int d = 0; d < nd; ++d)
    mcf.add_edge(1 + ns + d, sink, deficit[static_cast<std::size_t>(deficit_cells[static_cast<std::size_t>(d)])], 0);

  mcf.solve(source, sink, std::min(total_supply, total_deficit));

  std::vector<RelocationAssignment> out;
  for (int s = 0; s < ns; ++s) {
    const auto& vehicles = eligible[static_cast<std::size_t>(supply_cells[static_cast<std::size_t>(s)])];
    std::size_t next = 0;
    for (int d = 0; d < nd; ++d) {
      int flow = mcf.edge_flow(ns + s * nd + d);
      int target = deficit_cells[static_cast<std::size_t>(d)];
      for (int k = 0; k < flow; ++k) {
        VehicleIdx vid = vehicles[next++];
        if (target == supply_cells[static_cast<std::size_t>(s)]) continue;  // zero-cost self arc: stay
        out.push_back({vid, target, grid.central_link(target)});
      }
    }
  }
  return out;
}

}  // namespace savsim
