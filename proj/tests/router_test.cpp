#include "savsim/router.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace savsim;

namespace {

/// Triangle with an entry spur and an exit spur:
/// E: n0->nA, direct: nA->nC (slow), via: nA->nB->nC, D: nC->n3.
Network triangle_network(double direct_speed, double via_speed) {
  std::vector<Node> nodes = {{"n0", -100, 0}, {"nA", 0, 0}, {"nB", 500, 500},
                             {"nC", 1000, 0}, {"n3", 1100, 0}};
  std::vector<Link> links = {
      {"E", 0, 1, 100, 10, 3600, 1, 3},   {"AC", 1, 3, 1000, direct_speed, 3600, 1, 3},
      {"AB", 1, 2, 710, via_speed, 3600, 1, 3}, {"BC", 2, 3, 710, via_speed, 3600, 1, 3},
      {"D", 3, 4, 100, 10, 3600, 1, 3},
  };
  return build_network(nodes, links);
}

}  // namespace

TEST(Router, SameLinkIsZero) {
  Network net = testing::line_network(3);
  TravelTimeProfile profile;
  auto path = shortest_path(net, profile, 0, 0, 0);
  ASSERT_TRUE(path);
  EXPECT_TRUE(path->links.empty());
  EXPECT_DOUBLE_EQ(path->travel_time, 0);
  EXPECT_DOUBLE_EQ(path->distance_m, 0);
}

TEST(Router, TriangleTakesFasterTwoLinkPath) {
  // direct link slow (5 m/s over 1000 m = 200 s), via 710+710 m at 10 m/s = 142 s
  Network net = triangle_network(5, 10);
  TravelTimeProfile profile;
  auto path = shortest_path(net, profile, net.link_index("E"), net.link_index("D"), 0);
  ASSERT_TRUE(path);
  ASSERT_EQ(path->links.size(), 2u);
  EXPECT_EQ(net.links[path->links[0]].id, "AB");
  EXPECT_EQ(net.links[path->links[1]].id, "BC");
  auto oracle = testing::enumerate_min_travel_time(net, profile, net.links[net.link_index("E")].to,
                                                   net.links[net.link_index("D")].from, 0);
  ASSERT_TRUE(oracle);
  EXPECT_DOUBLE_EQ(path->travel_time, *oracle);
  EXPECT_DOUBLE_EQ(path->distance_m, 1420);
}

TEST(Router, UnreachableReturnsEmpty) {
  // two disconnected components
  std::vector<Node> nodes = {{"a", 0, 0}, {"b", 100, 0}, {"c", 0, 100}, {"d", 100, 100}};
  std::vector<Link> links = {{"l1", 0, 1, 100, 10, 3600, 1, 3}, {"l2", 2, 3, 100, 10, 3600, 1, 3}};
  Network net = build_network(nodes, links);
  EXPECT_FALSE(shortest_path(net, TravelTimeProfile{}, 0, 1, 0));
}

TEST(Router, PathContinuityOnRandomNetworks) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int n = uniform_int(rng, 4, 10);
    std::vector<Node> nodes;
    for (int i = 0; i < n; ++i)
      nodes.push_back({"n" + std::to_string(i), uniform_real(rng, 0, 1000),
                       uniform_real(rng, 0, 1000)});
    std::vector<Link> links;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || uniform_real(rng, 0, 1) > 0.4) continue;
        links.push_back({"l" + std::to_string(links.size()), static_cast<NodeIdx>(i),
                         static_cast<NodeIdx>(j), uniform_real(rng, 50, 500),
                         uniform_real(rng, 5, 20), 3600, 1, 3});
      }
    if (links.size() < 2) continue;
    Network net = build_network(nodes, links);
    TravelTimeProfile profile;
    LinkIdx a = static_cast<LinkIdx>(uniform_int(rng, 0, static_cast<int>(links.size()) - 1));
    LinkIdx b = static_cast<LinkIdx>(uniform_int(rng, 0, static_cast<int>(links.size()) - 1));
    auto path = shortest_path(net, profile, a, b, 0);
    if (!path) continue;
    NodeIdx at = net.links[a].to;
    for (LinkIdx l : path->links) {
      EXPECT_EQ(net.links[l].from, at);
      at = net.links[l].to;
    }
    EXPECT_EQ(at, net.links[b].from);
  }
}

TEST(Router, OptimalOnRandomNetworksVsEnumeration) {
  std::mt19937_64 rng(13);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = uniform_int(rng, 4, 10);
    std::vector<Node> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({"n" + std::to_string(i), 0, 0});
    std::vector<Link> links;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || uniform_real(rng, 0, 1) > 0.5) continue;
        links.push_back({"l" + std::to_string(links.size()), static_cast<NodeIdx>(i),
                         static_cast<NodeIdx>(j), uniform_real(rng, 50, 500),
                         uniform_real(rng, 5, 20), 3600, 1, 3});
      }
    if (links.size() < 2) continue;
    Network net = build_network(nodes, links);
    TravelTimeProfile profile;  // free flow: Dijkstra's optimality conditions hold exactly
    LinkIdx a = static_cast<LinkIdx>(uniform_int(rng, 0, static_cast<int>(links.size()) - 1));
    LinkIdx b = static_cast<LinkIdx>(uniform_int(rng, 0, static_cast<int>(links.size()) - 1));
    double depart = uniform_real(rng, 0, 3600);
    auto path = shortest_path(net, profile, a, b, depart);
    auto oracle =
        testing::enumerate_min_travel_time(net, profile, net.links[a].to, net.links[b].from, depart);
    ASSERT_EQ(path.has_value(), oracle.has_value());
    if (path) {
      EXPECT_NEAR(path->travel_time, *oracle, 1e-9);
      compared += 1;
    }
  }
  EXPECT_GT(compared, 50);
}

TEST(Profile, EmptyEventStreamIsFreeFlow) {
  Network net = testing::line_network(3);
  EventStream events;
  TravelTimeProfile p = TravelTimeProfile::from_events(net, events);
  EXPECT_DOUBLE_EQ(p.link_time(net, 0, 0), net.links[0].free_flow_time());
}

TEST(Profile, BinAveragesTraversals) {
  Network net = testing::line_network(3);
  EventStream ev;
  auto car = VehicleRef::car(0);
  auto car2 = VehicleRef::car(1);
  ev.emit({100, EventKind::link_enter, 0, car, 0});
  ev.emit({110, EventKind::link_leave, 0, car, 0});
  ev.emit({200, EventKind::link_enter, 1, car2, 0});
  ev.emit({220, EventKind::link_leave, 1, car2, 0});
  TravelTimeProfile p = TravelTimeProfile::from_events(net, ev, 900);
  EXPECT_DOUBLE_EQ(p.link_time(net, 0, 100), 15.0);  // mean of 10 s and 20 s
}

TEST(Profile, ClampsAtFreeFlow) {
  Network net = testing::line_network(3);  // free flow 10 s
  EventStream ev;
  auto car = VehicleRef::car(0);
  ev.emit({100, EventKind::link_enter, 0, car, 0});
  ev.emit({104, EventKind::link_leave, 0, car, 0});  // 4 s < free flow 10 s
  TravelTimeProfile p = TravelTimeProfile::from_events(net, ev, 900);
  EXPECT_DOUBLE_EQ(p.link_time(net, 0, 100), 10.0);
}

TEST(Profile, LeaveWithoutEnterRejected) {
  Network net = testing::line_network(3);
  EventStream ev;
  ev.emit({100, EventKind::link_leave, 0, VehicleRef::car(0), 0});
  EXPECT_THROW(TravelTimeProfile::from_events(net, ev), InvariantViolation);
}

TEST(Profile, MonotoneFloorProperty) {
  Network net = testing::line_network(5);
  std::mt19937_64 rng(99);
  EventStream ev;
  // random traversals, some shorter than free flow
  struct Open {
    LinkIdx link;
    Time enter;
  };
  std::vector<Event> raw;
  for (int i = 0; i < 200; ++i) {
    LinkIdx l = static_cast<LinkIdx>(uniform_int(rng, 0, static_cast<int>(net.links.size()) - 1));
    Time enter = uniform_int(rng, 0, 20000);
    Time leave = enter + uniform_int(rng, 2, 40);
    raw.push_back({enter, EventKind::link_enter, -1, VehicleRef::car(static_cast<PersonIdx>(i)), l});
    raw.push_back({leave, EventKind::link_leave, -1, VehicleRef::car(static_cast<PersonIdx>(i)), l});
  }
  std::stable_sort(raw.begin(), raw.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  for (const auto& e : raw) ev.emit(e);
  TravelTimeProfile p = TravelTimeProfile::from_events(net, ev, 900);
  for (LinkIdx l = 0; l < net.links.size(); ++l)
    for (Time t = 0; t < 25000; t += 450)
      EXPECT_GE(p.link_time(net, l, static_cast<double>(t)), net.links[l].free_flow_time() - 1e-12);
}

TEST(Profile, EntryTimeEvaluation) {
  // two bins with different average speeds; the router must price each link
  // at its entry time
  Network net = testing::line_network(3);
  EventStream ev;
  auto car = VehicleRef::car(0);
  // bin 0: link f0 (index 0) takes 100 s
  ev.emit({0, EventKind::link_enter, 0, car, 0});
  ev.emit({100, EventKind::link_leave, 0, car, 0});
  // bin 1: link f1 (index 2) takes 50 s
  ev.emit({950, EventKind::link_enter, 0, car, 2});
  ev.emit({1000, EventKind::link_leave, 0, car, 2});
  TravelTimeProfile p = TravelTimeProfile::from_events(net, ev, 900);

  // depart at 850 on a trip entering f0 in bin 0 and f1 in bin 1
  auto path = shortest_path(net, p, net.link_index("f0"), net.link_index("b1"), 850);
  ASSERT_TRUE(path);
  // f1 entered at 850 -> bin 0 -> free flow 10 s? No: f1 has no bin-0 data -> free flow.
  // Use explicit: enter f1 at 850 (free flow 10), so travel = 10.
  EXPECT_DOUBLE_EQ(path->travel_time, 10.0);
  auto path2 = shortest_path(net, p, net.link_index("f0"), net.link_index("b1"), 950);
  ASSERT_TRUE(path2);
  EXPECT_DOUBLE_EQ(path2->travel_time, 50.0);  // bin 1 average
}
