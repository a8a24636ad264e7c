#pragma once

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "savsim/common.hpp"
#include "savsim/network.hpp"

namespace savsim {

enum class EventKind : std::uint8_t {
  act_end,
  depart,
  link_enter,
  link_leave,
  person_arrives,
  request_submitted,
  request_scheduled,
  request_rejected,
  passenger_pickup,
  passenger_dropoff,
  task_start,
  task_end,
  relocation_start,
};

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::act_end: return "act_end";
    case EventKind::depart: return "depart";
    case EventKind::link_enter: return "link_enter";
    case EventKind::link_leave: return "link_leave";
    case EventKind::person_arrives: return "person_arrives";
    case EventKind::request_submitted: return "request_submitted";
    case EventKind::request_scheduled: return "request_scheduled";
    case EventKind::request_rejected: return "request_rejected";
    case EventKind::passenger_pickup: return "passenger_pickup";
    case EventKind::passenger_dropoff: return "passenger_dropoff";
    case EventKind::task_start: return "task_start";
    case EventKind::task_end: return "task_end";
    case EventKind::relocation_start: return "relocation_start";
  }
  return "?";
}

inline EventKind event_kind_from_name(const std::string& s) {
  static const std::pair<const char*, EventKind> table[] = {
      {"act_end", EventKind::act_end},
      {"depart", EventKind::depart},
      {"link_enter", EventKind::link_enter},
      {"link_leave", EventKind::link_leave},
      {"person_arrives", EventKind::person_arrives},
      {"request_submitted", EventKind::request_submitted},
      {"request_scheduled", EventKind::request_scheduled},
      {"request_rejected", EventKind::request_rejected},
      {"passenger_pickup", EventKind::passenger_pickup},
      {"passenger_dropoff", EventKind::passenger_dropoff},
      {"task_start", EventKind::task_start},
      {"task_end", EventKind::task_end},
      {"relocation_start", EventKind::relocation_start},
  };
  for (const auto& [name, kind] : table)
    if (s == name) return kind;
  throw ConfigError("unknown event kind: " + s);
}

/// Vehicle actor encoding: SAV fleet vehicles are nonnegative fleet indices,
/// private cars are encoded as ~person (cars are per-person, not shared).
struct VehicleRef {
  std::int64_t raw = -1;

  static VehicleRef none() { return {}; }
  static VehicleRef sav(VehicleIdx v) { return {static_cast<std::int64_t>(v)}; }
  static VehicleRef car(PersonIdx p) { return {~static_cast<std::int64_t>(p)}; }

  bool valid() const { return raw != -1; }
  bool is_sav() const { return raw >= 0; }
  bool is_car() const { return raw < -1; }
  VehicleIdx sav_index() const { return static_cast<VehicleIdx>(raw); }
  PersonIdx car_person() const { return static_cast<PersonIdx>(~raw); }
  bool operator==(const VehicleRef&) const = default;
};

/// One simulation event. `tag` carries the leg mode on depart/person_arrives
/// and the activity type on act_end; `value` carries the direct-time estimate
/// (seconds) on request_submitted and the extended-detour flag on
/// request_scheduled.
struct Event {
  Time time = 0;
  EventKind kind = EventKind::act_end;
  std::int64_t person = -1;
  VehicleRef vehicle;
  std::int64_t link = -1;
  std::int64_t request = -1;
  std::int16_t tag = -1;   // Mode underlying value or activity-type index
  double value = 0;
  bool has_value = false;
};

/// Append-only, time-ordered event buffer for one simulated day.
class EventStream {
 public:
  std::vector<Event> events;

  void emit(Event e) {
    if (!events.empty() && e.time < events.back().time)
      throw InvariantViolation("event stream time went backwards");
    events.push_back(e);
  }
  void clear() { events.clear(); }
  std::size_t size() const { return events.size(); }
  const Event& operator[](std::size_t i) const { return events[i]; }
  auto begin() const { return events.begin(); }
  auto end() const { return events.end(); }
};

namespace detail {

class LineSink {
 public:
  virtual ~LineSink() = default;
  virtual void write(const char* data, std::size_t n) = 0;
};

class FileSink : public LineSink {
 public:
  explicit FileSink(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot write file: " + path);
  }
  void write(const char* data, std::size_t n) override { out_.write(data, n); }

 private:
  std::ofstream out_;
};

class GzipSink : public LineSink {
 public:
  explicit GzipSink(const std::string& path) : gz_(gzopen(path.c_str(), "wb")) {
    if (!gz_) throw ConfigError("cannot write file: " + path);
  }
  ~GzipSink() override { gzclose(gz_); }
  void write(const char* data, std::size_t n) override {
    gzwrite(gz_, data, static_cast<unsigned>(n));
  }

 private:
  gzFile gz_;
};

}  // namespace detail

/// Writes the stream as CSV: time,kind,person,vehicle,link,request,tag,value.
/// `act_types` maps activity-type indices to names for the tag column.
/// Person labels are "p<idx>", SAV vehicles "sav<idx>", cars "car_p<idx>",
/// requests "r<idx>". Set gzip=true to write a .gz file.
inline void write_events_csv(const EventStream& stream, const Network& net,
                             const std::vector<std::string>& act_types, const std::string& path,
                             bool gzip = false) {
  std::unique_ptr<detail::LineSink> sink;
  if (gzip)
    sink = std::make_unique<detail::GzipSink>(path);
  else
    sink = std::make_unique<detail::FileSink>(path);

  const char* header = "time,kind,person,vehicle,link,request,tag,value\n";
  sink->write(header, std::strlen(header));

  char buf[256];
  std::string line;
  for (const Event& e : stream) {
    line.clear();
    int n = std::snprintf(buf, sizeof buf, "%lld,%s,", static_cast<long long>(e.time),
                          event_kind_name(e.kind));
    line.append(buf, n);
    if (e.person >= 0) {
      n = std::snprintf(buf, sizeof buf, "p%lld", static_cast<long long>(e.person));
      line.append(buf, n);
    }
    line.push_back(',');
    if (e.vehicle.is_sav()) {
      n = std::snprintf(buf, sizeof buf, "sav%u", e.vehicle.sav_index());
      line.append(buf, n);
    } else if (e.vehicle.is_car()) {
      n = std::snprintf(buf, sizeof buf, "car_p%u", e.vehicle.car_person());
      line.append(buf, n);
    }
    line.push_back(',');
    if (e.link >= 0) line.append(net.links[static_cast<std::size_t>(e.link)].id);
    line.push_back(',');
    if (e.request >= 0) {
      n = std::snprintf(buf, sizeof buf, "r%lld", static_cast<long long>(e.request));
      line.append(buf, n);
    }
    line.push_back(',');
    if (e.tag >= 0) {
      if (e.kind == EventKind::act_end)
        line.append(act_types[static_cast<std::size_t>(e.tag)]);
      else
        line.append(mode_name(static_cast<Mode>(e.tag)));
    }
    line.push_back(',');
    if (e.has_value) {
      n = std::snprintf(buf, sizeof buf, "%.6f", e.value);
      line.append(buf, n);
    }
    line.push_back('\n');
    sink->write(line.data(), line.size());
  }
}

/// Reads back an events CSV written by write_events_csv (plain or gzip).
inline EventStream read_events_csv(const Network& net, const std::vector<std::string>& act_types,
                                   const std::string& path) {
  std::string content;
  if (path.size() > 3 && path.substr(path.size() - 3) == ".gz") {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (!gz) throw ConfigError("cannot open file: " + path);
    char buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof buf)) > 0) content.append(buf, static_cast<std::size_t>(n));
    gzclose(gz);
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    content = ss.str();
  }

  std::unordered_map<std::string, std::int16_t> act_index;
  for (std::size_t i = 0; i < act_types.size(); ++i)
    act_index[act_types[i]] = static_cast<std::int16_t>(i);

  EventStream stream;
  std::size_t pos = 0;
  bool first = true;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string line = content.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    auto f = csv::split_line(line);
    if (f.size() != 8) throw ConfigError("malformed event row: " + line);
    Event e;
    e.time = csv::to_long(f[0], path);
    e.kind = event_kind_from_name(f[1]);
    if (!f[2].empty()) e.person = csv::to_long(f[2].substr(1), path);
    if (!f[3].empty()) {
      if (f[3].rfind("sav", 0) == 0)
        e.vehicle = VehicleRef::sav(static_cast<VehicleIdx>(csv::to_long(f[3].substr(3), path)));
      else if (f[3].rfind("car_p", 0) == 0)
        e.vehicle = VehicleRef::car(static_cast<PersonIdx>(csv::to_long(f[3].substr(5), path)));
      else
        throw ConfigError("bad vehicle ref: " + f[3]);
    }
    if (!f[4].empty()) e.link = net.link_index(f[4]);
    if (!f[5].empty()) e.request = csv::to_long(f[5].substr(1), path);
    if (!f[6].empty()) {
      if (e.kind == EventKind::act_end) {
        auto it = act_index.find(f[6]);
        if (it == act_index.end()) throw ConfigError("unknown activity type in events: " + f[6]);
        e.tag = it->second;
      } else {
        e.tag = static_cast<std::int16_t>(mode_from_name(f[6]));
      }
    }
    if (!f[7].empty()) {
      e.value = csv::to_double(f[7], path);
      e.has_value = true;
    }
    stream.emit(e);
  }
  return stream;
}

}  // namespace savsim
