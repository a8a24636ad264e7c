#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "savsim/common.hpp"
#include "savsim/csv.hpp"

namespace savsim {

struct Node {
  std::string id;
  double x = 0;  // meters, planar
  double y = 0;
};

/// Network modes as a bitmask; teleported modes (walk, pt) never touch links.
enum : std::uint8_t { kModeCarBit = 1, kModeSavBit = 2 };

struct Link {
  std::string id;
  NodeIdx from = kInvalidIdx;
  NodeIdx to = kInvalidIdx;
  double length_m = 0;
  double free_speed_ms = 0;
  double capacity_vph = 0;
  int lanes = 1;
  std::uint8_t allowed_modes = kModeCarBit | kModeSavBit;

  double free_flow_time() const { return length_m / free_speed_ms; }
  bool allows(Mode m) const {
    if (m == Mode::car) return allowed_modes & kModeCarBit;
    if (m == Mode::sav) return allowed_modes & kModeSavBit;
    return false;
  }
};

/// Effective vehicle length used to derive link storage capacity.
constexpr double kVehicleSpaceMeters = 7.5;

/// Directed road graph with an adjacency index. Immutable after construction;
/// concurrent read-only queries are safe.
class Network {
 public:
  std::vector<Node> nodes;
  std::vector<Link> links;
  std::vector<std::vector<LinkIdx>> out_links;  // per node

  NodeIdx node_index(const std::string& id) const {
    auto it = node_by_id_.find(id);
    if (it == node_by_id_.end()) throw ConfigError("unknown node id: " + id);
    return it->second;
  }
  LinkIdx link_index(const std::string& id) const {
    auto it = link_by_id_.find(id);
    if (it == link_by_id_.end()) throw ConfigError("unknown link id: " + id);
    return it->second;
  }
  bool has_link(const std::string& id) const { return link_by_id_.count(id) > 0; }

  /// Storage in vehicle units before downscaling: max(1, floor(length*lanes/7.5)).
  int storage(LinkIdx l) const { return storage_[l]; }

  double beeline_m(NodeIdx a, NodeIdx b) const {
    double dx = nodes[a].x - nodes[b].x;
    double dy = nodes[a].y - nodes[b].y;
    return std::sqrt(dx * dx + dy * dy);
  }

  friend Network build_network(std::vector<Node> nodes, std::vector<Link> links);

 private:
  std::unordered_map<std::string, NodeIdx> node_by_id_;
  std::unordered_map<std::string, LinkIdx> link_by_id_;
  std::vector<int> storage_;
};

/// Validates and indexes a graph. Link `from`/`to` fields must already be
/// resolved to node indices OR be resolvable via the node id fields; here we
/// accept links whose from/to indices are set by the caller.
inline Network build_network(std::vector<Node> nodes, std::vector<Link> links) {
  Network net;
  net.nodes = std::move(nodes);
  for (NodeIdx i = 0; i < net.nodes.size(); ++i) {
    if (!net.node_by_id_.emplace(net.nodes[i].id, i).second)
      throw ConfigError("duplicate node id: " + net.nodes[i].id);
  }
  net.links = std::move(links);
  net.out_links.assign(net.nodes.size(), {});
  net.storage_.reserve(net.links.size());
  for (LinkIdx i = 0; i < net.links.size(); ++i) {
    Link& l = net.links[i];
    if (l.from >= net.nodes.size() || l.to >= net.nodes.size())
      throw ConfigError("link " + l.id + ": dangling node reference");
    if (l.length_m <= 0) throw ConfigError("link " + l.id + ": nonpositive length");
    if (l.free_speed_ms <= 0) throw ConfigError("link " + l.id + ": nonpositive free speed");
    if (l.capacity_vph <= 0) throw ConfigError("link " + l.id + ": nonpositive capacity");
    if (l.lanes < 1) throw ConfigError("link " + l.id + ": lanes < 1");
    if (!net.link_by_id_.emplace(l.id, i).second)
      throw ConfigError("duplicate link id: " + l.id);
    net.out_links[l.from].push_back(i);
    net.storage_.push_back(
        std::max(1, static_cast<int>(std::floor(l.length_m * l.lanes / kVehicleSpaceMeters))));
  }
  return net;
}

/// Loads nodes.csv (id,x,y) and links.csv
/// (id,from,to,length_m,free_speed_ms,capacity_vph,lanes,modes).
/// `modes` is a |-separated subset of {car,sav}.
inline Network load_network(const std::string& nodes_path, const std::string& links_path) {
  csv::Table nt = csv::read_file(nodes_path);
  int nid = nt.require_column("id", nodes_path);
  int nx = nt.require_column("x", nodes_path);
  int ny = nt.require_column("y", nodes_path);
  std::vector<Node> nodes;
  nodes.reserve(nt.rows.size());
  std::unordered_map<std::string, NodeIdx> idx;
  for (const auto& r : nt.rows) {
    idx.emplace(r[nid], static_cast<NodeIdx>(nodes.size()));
    nodes.push_back({r[nid], csv::to_double(r[nx], nodes_path), csv::to_double(r[ny], nodes_path)});
  }

  csv::Table lt = csv::read_file(links_path);
  int c_id = lt.require_column("id", links_path);
  int c_from = lt.require_column("from", links_path);
  int c_to = lt.require_column("to", links_path);
  int c_len = lt.require_column("length_m", links_path);
  int c_speed = lt.require_column("free_speed_ms", links_path);
  int c_cap = lt.require_column("capacity_vph", links_path);
  int c_lanes = lt.require_column("lanes", links_path);
  int c_modes = lt.require_column("modes", links_path);
  std::vector<Link> links;
  links.reserve(lt.rows.size());
  for (const auto& r : lt.rows) {
    Link l;
    l.id = r[c_id];
    auto fit = idx.find(r[c_from]);
    auto tit = idx.find(r[c_to]);
    if (fit == idx.end()) throw ConfigError("link " + l.id + ": dangling node reference " + r[c_from]);
    if (tit == idx.end()) throw ConfigError("link " + l.id + ": dangling node reference " + r[c_to]);
    l.from = fit->second;
    l.to = tit->second;
    l.length_m = csv::to_double(r[c_len], links_path);
    l.free_speed_ms = csv::to_double(r[c_speed], links_path);
    l.capacity_vph = csv::to_double(r[c_cap], links_path);
    l.lanes = static_cast<int>(csv::to_long(r[c_lanes], links_path));
    l.allowed_modes = 0;
    for (const auto& m : csv::split_line(r[c_modes], '|')) {
      if (m == "car") l.allowed_modes |= kModeCarBit;
      else if (m == "sav") l.allowed_modes |= kModeSavBit;
      else throw ConfigError("link " + l.id + ": unknown network mode " + m);
    }
    if (l.allowed_modes == 0) l.allowed_modes = kModeCarBit | kModeSavBit;
    links.push_back(std::move(l));
  }
  return build_network(std::move(nodes), std::move(links));
}

inline void write_network(const Network& net, const std::string& nodes_path,
                          const std::string& links_path) {
  std::vector<std::vector<std::string>> nrows;
  for (const auto& n : net.nodes)
    nrows.push_back({n.id, std::to_string(n.x), std::to_string(n.y)});
  csv::write_file(nodes_path, {"id", "x", "y"}, nrows);

  std::vector<std::vector<std::string>> lrows;
  for (const auto& l : net.links) {
    std::string modes;
    if (l.allowed_modes & kModeCarBit) modes = "car";
    if (l.allowed_modes & kModeSavBit) modes += (modes.empty() ? "sav" : "|sav");
    lrows.push_back({l.id, net.nodes[l.from].id, net.nodes[l.to].id, std::to_string(l.length_m),
                     std::to_string(l.free_speed_ms), std::to_string(l.capacity_vph),
                     std::to_string(l.lanes), modes});
  }
  csv::write_file(links_path,
                  {"id", "from", "to", "length_m", "free_speed_ms", "capacity_vph", "lanes", "modes"},
                  lrows);
}

}  // namespace savsim
