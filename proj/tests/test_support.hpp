#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "savsim/network.hpp"
#include "savsim/router.hpp"
#include "savsim/savfleet.hpp"

namespace savsim::testing {

/// Straight chain of n nodes: links f0..f(n-2) forward, b... backward.
inline Network line_network(int n, double length = 100, double speed = 10) {
  std::vector<Node> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back({"n" + std::to_string(i), i * length, 0});
  std::vector<Link> links;
  for (int i = 0; i + 1 < n; ++i) {
    links.push_back({"f" + std::to_string(i), static_cast<NodeIdx>(i), static_cast<NodeIdx>(i + 1),
                     length, speed, 3600, 1, kModeCarBit | kModeSavBit});
    links.push_back({"b" + std::to_string(i), static_cast<NodeIdx>(i + 1), static_cast<NodeIdx>(i),
                     length, speed, 3600, 1, kModeCarBit | kModeSavBit});
  }
  return build_network(std::move(nodes), std::move(links));
}

/// Exhaustive simple-path enumeration between two nodes, evaluating each link
/// at its entry time under the profile — the independent router oracle.
inline std::optional<double> enumerate_min_travel_time(const Network& net,
                                                       const TravelTimeProfile& profile,
                                                       NodeIdx src, NodeIdx dst, double depart,
                                                       Mode mode = Mode::car) {
  if (src == dst) return 0.0;
  std::optional<double> best;
  std::vector<bool> visited(net.nodes.size(), false);
  std::function<void(NodeIdx, double)> dfs = [&](NodeIdx u, double t) {
    if (u == dst) {
      double total = t - depart;
      if (!best || total < *best) best = total;
      return;
    }
    visited[u] = true;
    for (LinkIdx l : net.out_links[u]) {
      if (!net.links[l].allows(mode)) continue;
      NodeIdx v = net.links[l].to;
      if (visited[v]) continue;
      dfs(v, t + profile.link_time(net, l, t));
    }
    visited[u] = false;
  };
  dfs(src, depart);
  return best;
}

/// From-scratch insertion oracle: enumerates every (vehicle, i, j), rebuilds
/// the full stop timeline independently, checks all constraints from first
/// principles and returns the scan-order-first minimal work increase.
struct OracleInsertion {
  VehicleIdx vehicle = kInvalidIdx;
  std::size_t i = 0, j = 0;
  double delta_work = 0;
  bool flagged = false;
};

inline std::optional<OracleInsertion> brute_force_insertion(
    const Network& net, const TravelTimeOracle& oracle, const DispatchParams& params,
    bool ridesharing, const Request& req, const std::vector<SavVehicle>& fleet,
    const std::vector<Request>& requests, double now) {
  auto leg_time = [&](LinkIdx a, LinkIdx b, double t) { return oracle.link_to_link(a, b, t); };

  std::optional<OracleInsertion> best;
  for (const SavVehicle& v : fleet) {
    if (!ridesharing &&
        !(v.onboard.empty() && v.stops.empty() && !(v.active_stop && !v.active_stop->pickups.empty())))
      continue;

    // release point per the published vehicle contract
    double release = now;
    LinkIdx pos = v.cur_link;
    if (v.phase == VehiclePhase::stopping) release = std::max(release, double(v.stop_until));
    if (v.phase == VehiclePhase::driving && v.on_network) {
      TravelTimeProfile empty_profile;  // oracle tests run on free-flow profiles
      release = std::max(release, double(v.link_entered) + net.links[v.cur_link].free_flow_time());
    }

    auto timeline = [&](const std::vector<StopPlan>& stops) {
      std::vector<std::pair<double, double>> times;  // (arrive, depart)
      double t = release;
      LinkIdx at = pos;
      for (const auto& s : stops) {
        t += leg_time(at, s.link, t);
        double arrive = t;
        t += params.stop_seconds;
        times.push_back({arrive, t});
        at = s.link;
      }
      return times;
    };

    double base_end = release;
    {
      auto base = timeline(v.stops);
      if (!base.empty()) base_end = base.back().second;
    }

    for (std::size_t i = 0; i <= v.stops.size(); ++i) {
      for (std::size_t j = i; j <= v.stops.size(); ++j) {
        std::vector<StopPlan> stops;
        for (std::size_t k = 0; k <= v.stops.size(); ++k) {
          if (k == i) stops.push_back({req.origin, {req.idx}, {}});
          if (k == j) stops.push_back({req.destination, {}, {req.idx}});
          if (k < v.stops.size()) stops.push_back(v.stops[k]);
        }
        auto times = timeline(stops);

        // capacity profile
        bool ok = true;
        int onboard = static_cast<int>(v.onboard.size());
        for (std::size_t k = 0; k < stops.size() && ok; ++k) {
          onboard -= static_cast<int>(stops[k].dropoffs.size());
          onboard += static_cast<int>(stops[k].pickups.size());
          if (onboard > v.capacity) ok = false;
        }
        if (!ok) continue;

        bool flagged = false;
        for (std::size_t k = 0; k < stops.size() && ok; ++k) {
          for (RequestIdx rid : stops[k].pickups) {
            const Request& r = rid == req.idx ? req : requests[rid];
            double wait = times[k].second + params.time_buffer_s - double(r.submitted);
            if (wait > params.max_wait_s) {
              ok = false;
              break;
            }
            // find the dropoff
            double ride = -1;
            for (std::size_t m = k; m < stops.size(); ++m)
              for (RequestIdx d : stops[m].dropoffs)
                if (d == rid) ride = times[m].first - times[k].second;
            ride += params.time_buffer_s;
            if (rid == req.idx) {
              if (ride > params.detour_factor * r.direct_time_s) {
                if (!params.extended_tier) {
                  ok = false;
                  break;
                }
                flagged = true;
              }
            } else if (!r.extended_detour && ride > params.detour_factor * r.direct_time_s) {
              ok = false;
              break;
            }
          }
          if (!ok) break;
          for (RequestIdx rid : stops[k].dropoffs) {
            if (rid == req.idx) continue;
            const Request& r = requests[rid];
            if (r.status != RequestStatus::picked_up || r.extended_detour) continue;
            double ride = times[k].first + params.time_buffer_s - double(r.picked_up_at);
            if (ride > params.detour_factor * r.direct_time_s) {
              ok = false;
              break;
            }
          }
        }
        if (!ok) continue;

        double dwork = (times.empty() ? release : times.back().second) - base_end;
        if (!best || dwork < best->delta_work)
          best = OracleInsertion{v.idx, i, j, dwork, flagged};
      }
    }
  }
  return best;
}

/// Brute-force transportation oracle: recursively enumerates all integral flow
/// matrices shipping min(total supply, total demand) units and returns the
/// minimum total cost.
inline double brute_force_transport(const std::vector<int>& supply, const std::vector<int>& demand,
                                    const std::vector<std::vector<double>>& cost) {
  int total_supply = 0, total_demand = 0;
  for (int s : supply) total_supply += s;
  for (int d : demand) total_demand += d;
  int ship = std::min(total_supply, total_demand);

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> remaining_demand = demand;

  std::function<void(std::size_t, std::vector<int>&, int, double)> rec =
      [&](std::size_t s, std::vector<int>& dem, int shipped, double acc) {
        if (acc >= best) return;
        if (shipped == ship) {
          best = std::min(best, acc);
          return;
        }
        if (s >= supply.size()) return;
        // how much source s can still ship is bounded by its supply; enumerate
        // distributions of source s over all sinks
        std::function<void(std::size_t, int, double)> place = [&](std::size_t d, int left,
                                                                  double acc2) {
          if (acc2 >= best) return;
          if (d == dem.size()) {
            rec(s + 1, dem, shipped + (supply[s] - left), acc2);
            return;
          }
          int max_here = std::min(left, dem[d]);
          for (int f = 0; f <= max_here; ++f) {
            dem[d] -= f;
            place(d + 1, left - f, acc2 + f * cost[s][d]);
            dem[d] += f;
          }
        };
        place(0, supply[s], acc);
      };
  rec(0, remaining_demand, 0, 0.0);
  return best;
}

}  // namespace savsim::testing
