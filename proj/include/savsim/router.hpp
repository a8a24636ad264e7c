#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "savsim/common.hpp"
#include "savsim/events.hpp"
#include "savsim/network.hpp"

namespace savsim {

/// Per-link binned average traversal times experienced in the previous
/// iteration. Bins without observations fall back to free flow; stored values
/// never drop below the link's free-flow time.
class TravelTimeProfile {
 public:
  TravelTimeProfile() = default;
  explicit TravelTimeProfile(Time bin_seconds) : bin_seconds_(bin_seconds) {}

  Time bin_seconds() const { return bin_seconds_; }

  double link_time(const Network& net, LinkIdx l, double entry_time) const {
    double free = net.links[l].free_flow_time();
    if (bins_.empty() || bins_[l].empty()) return free;
    auto bin = static_cast<std::size_t>(std::max(0.0, entry_time) / static_cast<double>(bin_seconds_));
    if (bin >= bins_[l].size()) bin = bins_[l].size() - 1;
    double v = bins_[l][bin];
    return v < 0 ? free : v;
  }

  /// Builds per-bin mean traversal times from paired link_enter/link_leave
  /// events, keyed by entry-time bin. A link_leave without a preceding
  /// link_enter signals a mobsim bug and is rejected.
  static TravelTimeProfile from_events(const Network& net, const EventStream& events,
                                       Time bin_seconds = 900) {
    TravelTimeProfile p(bin_seconds);
    Time horizon = events.size() ? events[events.size() - 1].time : 0;
    std::size_t nbins = static_cast<std::size_t>(horizon / bin_seconds) + 1;
    std::vector<std::vector<double>> sum(net.links.size(), std::vector<double>(nbins, 0));
    std::vector<std::vector<int>> count(net.links.size(), std::vector<int>(nbins, 0));
    // open traversal per (vehicle, link): entry time
    std::unordered_map<std::int64_t, std::pair<std::int64_t, Time>> open;
    for (const Event& e : events) {
      if (e.kind == EventKind::link_enter) {
        open[e.vehicle.raw] = {e.link, e.time};
      } else if (e.kind == EventKind::link_leave) {
        auto it = open.find(e.vehicle.raw);
        if (it == open.end() || it->second.first != e.link)
          throw InvariantViolation("link_leave without matching link_enter");
        Time entry = it->second.second;
        open.erase(it);
        auto bin = static_cast<std::size_t>(entry / bin_seconds);
        sum[static_cast<std::size_t>(e.link)][bin] += static_cast<double>(e.time - entry);
        count[static_cast<std::size_t>(e.link)][bin] += 1;
      }
    }
    p.bins_.assign(net.links.size(), std::vector<double>(nbins, -1));
    for (LinkIdx l = 0; l < net.links.size(); ++l) {
      double free = net.links[l].free_flow_time();
      for (std::size_t b = 0; b < nbins; ++b)
        if (count[l][b] > 0) p.bins_[l][b] = std::max(free, sum[l][b] / count[l][b]);
    }
    return p;
  }

 private:
  Time bin_seconds_ = 900;
  std::vector<std::vector<double>> bins_;  // -1 = no observation (free flow)
};

struct Path {
  std::vector<LinkIdx> links;  // strictly between origin and destination link
  double travel_time = 0;
  double distance_m = 0;
};

/// Time-dependent one-to-one router. Positions are links: the traveler leaves
/// from the origin link's downstream node and arrives at the destination
/// link's upstream node; the two endpoint links themselves are not traversed.
/// Link costs are evaluated at their entry times (no within-link
/// interpolation). Returns nullopt when the destination is unreachable.
inline std::optional<Path> shortest_path(const Network& net, const TravelTimeProfile& profile,
                                         LinkIdx origin_link, LinkIdx dest_link, double depart_time,
                                         Mode mode = Mode::car) {
  if (!net.links[origin_link].allows(mode) || !net.links[dest_link].allows(mode))
    throw ConfigError("shortest_path: endpoint link does not allow mode");
  Path path;
  if (origin_link == dest_link) return path;
  NodeIdx src = net.links[origin_link].to;
  NodeIdx dst = net.links[dest_link].from;
  if (src == dst) return path;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> arrival(net.nodes.size(), kInf);
  std::vector<LinkIdx> via(net.nodes.size(), kInvalidIdx);
  using QItem = std::pair<double, NodeIdx>;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<>> queue;
  arrival[src] = depart_time;
  queue.push({depart_time, src});
  while (!queue.empty()) {
    auto [t, u] = queue.top();
    queue.pop();
    if (t > arrival[u]) continue;
    if (u == dst) break;
    for (LinkIdx l : net.out_links[u]) {
      if (!net.links[l].allows(mode)) continue;
      double t2 = t + profile.link_time(net, l, t);
      NodeIdx v = net.links[l].to;
      if (t2 < arrival[v]) {
        arrival[v] = t2;
        via[v] = l;
        queue.push({t2, v});
      }
    }
  }
  if (arrival[dst] == kInf) return std::nullopt;

  for (NodeIdx u = dst; u != src;) {
    LinkIdx l = via[u];
    path.links.push_back(l);
    path.distance_m += net.links[l].length_m;
    u = net.links[l].from;
  }
  std::reverse(path.links.begin(), path.links.end());
  path.travel_time = arrival[dst] - depart_time;
  return path;
}

/// Cached link-to-link travel-time estimates for the dispatcher. One-to-all
/// Dijkstra results are cached per (origin node, time slice); within a slice
/// all queries share the slice-start departure time. Cleared whenever the
/// underlying profile changes (between iterations).
class TravelTimeOracle {
 public:
  TravelTimeOracle(const Network& net, const TravelTimeProfile& profile, Time slice_seconds = 900)
      : net_(&net), profile_(&profile), slice_(slice_seconds) {}

  double link_to_link(LinkIdx from, LinkIdx to, double when) const {
    if (from == to) return 0;
    NodeIdx src = net_->links[from].to;
    NodeIdx dst = net_->links[to].from;
    if (src == dst) return 0;
    auto slice = static_cast<std::uint64_t>(std::max(0.0, when) / static_cast<double>(slice_));
    std::uint64_t key = (static_cast<std::uint64_t>(src) << 24) | slice;
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, one_to_all(src, static_cast<double>(slice * static_cast<std::uint64_t>(slice_)))).first;
    }
    return it->second[dst];
  }

  void clear() { cache_.clear(); }

 private:
  std::vector<double> one_to_all(NodeIdx src, double depart) const {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> arrival(net_->nodes.size(), kInf);
    using QItem = std::pair<double, NodeIdx>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> queue;
    arrival[src] = depart;
    queue.push({depart, src});
    while (!queue.empty()) {
      auto [t, u] = queue.top();
      queue.pop();
      if (t > arrival[u]) continue;
      for (LinkIdx l : net_->out_links[u]) {
        if (!net_->links[l].allows(Mode::sav)) continue;
        double t2 = t + profile_->link_time(*net_, l, t);
        NodeIdx v = net_->links[l].to;
        if (t2 < arrival[v]) {
          arrival[v] = t2;
          queue.push({t2, v});
        }
      }
    }
    for (double& a : arrival) a = (a == kInf) ? kInf : a - depart;
    return arrival;
  }

  const Network* net_;
  const TravelTimeProfile* profile_;
  Time slice_;
  mutable std::unordered_map<std::uint64_t, std::vector<double>> cache_;
};

}  // namespace savsim
