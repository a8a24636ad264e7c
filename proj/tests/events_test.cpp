#include "savsim/events.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "test_support.hpp"

using namespace savsim;

namespace {
const std::vector<std::string> kActTypes = {"home", "work", "shopping"};
}

TEST(Events, StreamRejectsTimeTravel) {
  EventStream s;
  s.emit({10, EventKind::act_end, 0, VehicleRef::none(), 0, -1, 0});
  EXPECT_THROW(s.emit({9, EventKind::act_end, 0, VehicleRef::none(), 0, -1, 0}),
               InvariantViolation);
}

TEST(Events, VehicleRefEncoding) {
  auto sav = VehicleRef::sav(12);
  auto car = VehicleRef::car(40001);
  EXPECT_TRUE(sav.is_sav());
  EXPECT_FALSE(sav.is_car());
  EXPECT_EQ(sav.sav_index(), 12u);
  EXPECT_TRUE(car.is_car());
  EXPECT_EQ(car.car_person(), 40001u);
  EXPECT_FALSE(VehicleRef::none().valid());
}

TEST(Events, CsvRoundTripProperty) {
  Network net = testing::line_network(5);
  std::mt19937_64 rng(4242);
  EventStream stream;
  Time t = 0;
  for (int i = 0; i < 500; ++i) {
    Event e;
    t += uniform_int(rng, 0, 5);
    e.time = t;
    e.kind = static_cast<EventKind>(uniform_int(rng, 0, 12));
    if (uniform_real(rng, 0, 1) < 0.8) e.person = uniform_int(rng, 0, 99);
    double which = uniform_real(rng, 0, 1);
    if (which < 0.4)
      e.vehicle = VehicleRef::sav(static_cast<VehicleIdx>(uniform_int(rng, 0, 20)));
    else if (which < 0.7)
      e.vehicle = VehicleRef::car(static_cast<PersonIdx>(uniform_int(rng, 0, 99)));
    if (uniform_real(rng, 0, 1) < 0.6)
      e.link = uniform_int(rng, 0, static_cast<int>(net.links.size()) - 1);
    if (e.kind == EventKind::request_submitted || e.kind == EventKind::request_scheduled) {
      e.request = uniform_int(rng, 0, 50);
      e.value = uniform_real(rng, 0, 1000);
      e.has_value = true;
    }
    if (e.kind == EventKind::act_end) e.tag = static_cast<std::int16_t>(uniform_int(rng, 0, 2));
    if (e.kind == EventKind::depart || e.kind == EventKind::person_arrives)
      e.tag = static_cast<std::int16_t>(uniform_int(rng, 0, 3));
    stream.emit(e);
  }

  auto dir = std::filesystem::temp_directory_path() / "savsim_events_test";
  std::filesystem::create_directories(dir);
  for (bool gzip : {false, true}) {
    std::string path = (dir / (gzip ? "ev.csv.gz" : "ev.csv")).string();
    write_events_csv(stream, net, kActTypes, path, gzip);
    EventStream back = read_events_csv(net, kActTypes, path);
    ASSERT_EQ(back.size(), stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
      EXPECT_EQ(back[i].time, stream[i].time);
      EXPECT_EQ(back[i].kind, stream[i].kind);
      EXPECT_EQ(back[i].person, stream[i].person);
      EXPECT_EQ(back[i].vehicle, stream[i].vehicle);
      EXPECT_EQ(back[i].link, stream[i].link);
      EXPECT_EQ(back[i].request, stream[i].request);
      EXPECT_EQ(back[i].tag, stream[i].tag);
      if (stream[i].has_value) EXPECT_NEAR(back[i].value, stream[i].value, 1e-6);
    }
  }
  std::filesystem::remove_all(dir);
}
