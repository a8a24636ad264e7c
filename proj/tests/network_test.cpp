#include "savsim/network.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "test_support.hpp"

using namespace savsim;

TEST(Network, StorageFromLengthAndLanes) {
  std::vector<Node> nodes = {{"a", 0, 0}, {"b", 100, 0}};
  std::vector<Link> links = {{"l1", 0, 1, 100, 10, 3600, 1, kModeCarBit}};
  Network net = build_network(nodes, links);
  EXPECT_EQ(net.storage(0), 13);  // floor(100 / 7.5)
}

TEST(Network, StorageFloorsAtOneVehicle) {
  std::vector<Node> nodes = {{"a", 0, 0}, {"b", 5, 0}};
  std::vector<Link> links = {{"l1", 0, 1, 5, 10, 3600, 1, kModeCarBit}};
  Network net = build_network(nodes, links);
  EXPECT_EQ(net.storage(0), 1);  // max(1, floor(5 / 7.5))
}

TEST(Network, DanglingNodeReferenceFails) {
  std::vector<Node> nodes = {{"a", 0, 0}};
  std::vector<Link> links = {{"l1", 0, 7, 100, 10, 3600, 1, kModeCarBit}};
  EXPECT_THROW(build_network(nodes, links), ConfigError);
}

TEST(Network, NonpositiveAttributesFail) {
  std::vector<Node> nodes = {{"a", 0, 0}, {"b", 100, 0}};
  EXPECT_THROW(build_network(nodes, {{"l1", 0, 1, 0, 10, 3600, 1, kModeCarBit}}), ConfigError);
  EXPECT_THROW(build_network(nodes, {{"l1", 0, 1, 100, 0, 3600, 1, kModeCarBit}}), ConfigError);
  EXPECT_THROW(build_network(nodes, {{"l1", 0, 1, 100, 10, 0, 1, kModeCarBit}}), ConfigError);
  EXPECT_THROW(build_network(nodes, {{"l1", 0, 1, 100, 10, 3600, 0, kModeCarBit}}), ConfigError);
}

TEST(Network, DuplicateIdsFail) {
  std::vector<Node> nodes = {{"a", 0, 0}, {"a", 1, 0}};
  EXPECT_THROW(build_network(nodes, {}), ConfigError);
}

TEST(Network, CsvRoundTrip) {
  Network net = testing::line_network(4);
  auto dir = std::filesystem::temp_directory_path() / "savsim_net_test";
  std::filesystem::create_directories(dir);
  write_network(net, (dir / "nodes.csv").string(), (dir / "links.csv").string());
  Network back = load_network((dir / "nodes.csv").string(), (dir / "links.csv").string());
  ASSERT_EQ(back.nodes.size(), net.nodes.size());
  ASSERT_EQ(back.links.size(), net.links.size());
  for (std::size_t i = 0; i < net.links.size(); ++i) {
    EXPECT_EQ(back.links[i].id, net.links[i].id);
    EXPECT_EQ(back.links[i].from, net.links[i].from);
    EXPECT_EQ(back.links[i].to, net.links[i].to);
    EXPECT_DOUBLE_EQ(back.links[i].length_m, net.links[i].length_m);
    EXPECT_EQ(back.links[i].allowed_modes, net.links[i].allowed_modes);
  }
  std::filesystem::remove_all(dir);
}

TEST(Network, LoadReportsDanglingReferenceByName) {
  auto dir = std::filesystem::temp_directory_path() / "savsim_net_dangling";
  std::filesystem::create_directories(dir);
  {
    std::ofstream n((dir / "nodes.csv").string());
    n << "id,x,y\na,0,0\n";
    std::ofstream l((dir / "links.csv").string());
    l << "id,from,to,length_m,free_speed_ms,capacity_vph,lanes,modes\nl1,a,Z,100,10,3600,1,car\n";
  }
  try {
    load_network((dir / "nodes.csv").string(), (dir / "links.csv").string());
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("Z"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
