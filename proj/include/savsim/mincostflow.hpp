#pragma once

#include <limits>
#include <queue>
#include <vector>

#include "savsim/common.hpp"

namespace savsim {

/// Small deterministic min-cost max-flow solver (successive shortest paths
/// with Johnson potentials). Sized for the rebalancer's transportation
/// instances: tens of nodes, integral capacities, nonnegative real costs.
class MinCostFlow {
 public:
  explicit MinCostFlow(int num_nodes) : head_(static_cast<std::size_t>(num_nodes), -1) {}

  void add_edge(int from, int to, int capacity, double cost) {
    edges_.push_back({to, head_[static_cast<std::size_t>(from)], capacity, cost});
    head_[static_cast<std::size_t>(from)] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({from, head_[static_cast<std::size_t>(to)], 0, -cost});
    head_[static_cast<std::size_t>(to)] = static_cast<int>(edges_.size()) - 1;
  }

  struct Result {
    int flow = 0;
    double cost = 0;
  };

  /// Ships up to max_flow units from s to t, minimizing total cost.
  Result solve(int s, int t, int max_flow = std::numeric_limits<int>::max()) {
    const double kInf = std::numeric_limits<double>::infinity();
    std::size_t n = head_.size();
    std::vector<double> potential(n, 0);
    Result res;
    while (res.flow < max_flow) {
      // Dijkstra on reduced costs (all costs here are nonnegative, so the
      // zero initial potential is valid).
      std::vector<double> dist(n, kInf);
      std::vector<int> in_edge(n, -1);
      using QItem = std::pair<double, int>;
      std::priority_queue<QItem, std::vector<QItem>, std::greater<>> queue;
      dist[static_cast<std::size_t>(s)] = 0;
      queue.push({0, s});
      while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (int e = head_[static_cast<std::size_t>(u)]; e != -1; e = edges_[static_cast<std::size_t>(e)].next) {
          const Edge& edge = edges_[static_cast<std::size_t>(e)];
          if (edge.capacity <= 0) continue;
          double nd = d + edge.cost + potential[static_cast<std::size_t>(u)] -
                      potential[static_cast<std::size_t>(edge.to)];
          if (nd < dist[static_cast<std::size_t>(edge.to)] - 1e-12) {
            dist[static_cast<std::size_t>(edge.to)] = nd;
            in_edge[static_cast<std::size_t>(edge.to)] = e;
            queue.push({nd, edge.to});
          }
        }
      }
      if (dist[static_cast<std::size_t>(t)] == kInf) break;
      for (std::size_t u = 0; u < n; ++u)
        if (dist[u] < kInf) potential[u] += dist[u];

      int push = max_flow - res.flow;
      for (int u = t; u != s;) {
        const Edge& e = edges_[static_cast<std::size_t>(in_edge[static_cast<std::size_t>(u)])];
        push = std::min(push, e.capacity);
        u = edges_[static_cast<std::size_t>(in_edge[static_cast<std::size_t>(u)] ^ 1)].to;
      }
      for (int u = t; u != s;) {
        int ei = in_edge[static_cast<std::size_t>(u)];
        edges_[static_cast<std::size_t>(ei)].capacity -= push;
        edges_[static_cast<std::size_t>(ei ^ 1)].capacity += push;
        res.cost += push * edges_[static_cast<std::size_t>(ei)].cost;
        u = edges_[static_cast<std::size_t>(ei ^ 1)].to;
      }
      res.flow += push;
    }
    return res;
  }

  /// Flow shipped on the i-th added edge (by insertion order).
  int edge_flow(int i) const { return edges_[static_cast<std::size_t>(2 * i + 1)].capacity; }

 private:
  struct Edge {
    int to;
    int next;
    int capacity;
    double cost;
  };
  std::vector<Edge> edges_;
  std::vector<int> head_;
};

}  // namespace savsim
