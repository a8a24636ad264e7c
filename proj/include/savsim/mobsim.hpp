#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <queue>
#include <vector>

#include "savsim/common.hpp"
#include "savsim/events.hpp"
#include "savsim/network.hpp"
#include "savsim/population_types.hpp"
#include "savsim/router.hpp"
#include "savsim/savfleet.hpp"
#include "savsim/scoring.hpp"

namespace savsim {

struct TeleportParams {
  double walk_speed_ms = 1.34;
  double pt_speed_ms = 6.7;
  double pt_wait_s = 300;
  double beeline_factor = 1.3;
};

/// Exact arrival time of a teleported leg:
/// depart + beeline * factor / speed + fixed wait. The mobsim rounds up to
/// the next whole second when scheduling the arrival event.
inline double teleport_arrival(const TeleportParams& p, Mode mode, double beeline_m,
                               double depart_time) {
  if (mode == Mode::walk) return depart_time + beeline_m * p.beeline_factor / p.walk_speed_ms;
  if (mode == Mode::pt)
    return depart_time + beeline_m * p.beeline_factor / p.pt_speed_ms + p.pt_wait_s;
  throw ConfigError("teleport_arrival: mode is network-simulated");
}

struct MobsimConfig {
  double sample_rate = 1.0;  // scales link flow and storage capacities
  Time horizon_cap = 48 * kSecondsPerHour;
  TeleportParams teleport;
  FareScheme fares;
  DispatchParams dispatch;
  bool ridesharing = true;
  bool rebalancing = false;
  RebalanceParams rebalance;
};

struct DayResult {
  EventStream events;
  std::vector<PlanExperience> experiences;
  std::vector<Request> requests;
  std::array<long, 4> legs_by_mode{};  // indexed by Mode
  int stranded = 0;
  Time end_time = 0;
};

namespace detail {

/// Token-bucket outflow budget plus storage-constrained FIFO queue of one link.
struct LinkState {
  std::deque<std::pair<VehicleRef, Time>> queue;  // (vehicle, earliest exit)
  std::deque<VehicleRef> entries;                 // vehicles waiting to enter
  double budget = 0;
  Time budget_time = 0;
  int storage_used = 0;
};

struct PersonState {
  std::size_t act = 0;  // activity currently performed / being left
  Time arrived = 0;     // arrival time at the current activity
  bool done = false;
  const std::vector<LinkIdx>* route = nullptr;  // car leg in progress
  std::size_t route_pos = 0;                    // next route index to enter
  Time leg_departed = 0;
  RequestIdx last_request = kInvalidIdx;
};

}  // namespace detail

/// Queue-based within-day traffic simulation. Executes all selected plans and
/// the SAV fleet in 1-second steps, producing the day's event stream and
/// per-person experiences. Strictly single-threaded; event order is the
/// correctness anchor.
class Mobsim {
 public:
  Mobsim(const Network& net, const TravelTimeProfile& profile,
         const std::vector<Person>& persons, const std::vector<const Plan*>& plans,
         std::vector<SavVehicle> fleet, const MobsimConfig& cfg,
         const DemandEstimator* demand_history, const CellGrid* grid)
      : net_(net),
        profile_(profile),
        persons_(persons),
        plans_(plans),
        fleet_(std::move(fleet)),
        cfg_(cfg),
        demand_history_(demand_history),
        grid_(grid),
        oracle_(net, profile, profile.bin_seconds()),
        dispatcher_(net, oracle_, profile, cfg.dispatch, cfg.ridesharing) {
    if (cfg_.rebalancing && !grid_)
      throw ConfigError("mobsim: rebalancing enabled without a cell grid");
    validate_plans();
  }

  /// Parking availability per link (all true when empty); from the zone table.
  std::vector<bool> parking_by_link;

  DayResult run() {
    links_.assign(net_.links.size(), {});
    states_.assign(persons_.size(), {});
    result_ = DayResult{};
    result_.experiences.assign(persons_.size(), {});

    pending_persons_ = 0;
    for (PersonIdx p = 0; p < persons_.size(); ++p) {
      const Plan& plan = *plans_[p];
      if (plan.activities.size() == 1) {
        states_[p].done = true;  // stays home all day
        continue;
      }
      schedule_act_end(p, *plan.activities[0].end_time);
      pending_persons_ += 1;
    }

    for (Time t = 0; pending_persons_ > 0 || !all_vehicles_idle(); ++t) {
      if (t > cfg_.horizon_cap) break;  // remaining persons are stranded
      now_ = t;
      step_persons(t);
      step_fleet(t);
      if (cfg_.rebalancing && pending_persons_ > 0 && t % cfg_.rebalance.interval_s == 0)
        step_rebalance(t);
      step_network(t);
    }
    finalize_experiences();
    result_.end_time = result_.events.size() ? result_.events[result_.events.size() - 1].time : 0;
    result_.requests = requests_;
    return std::move(result_);
  }

 private:
  // ---- plan validation (malformed plans are rejected before the day starts)

  void validate_plans() {
    for (PersonIdx p = 0; p < persons_.size(); ++p) {
      const Plan& plan = *plans_[p];
      if (!plan.valid_shape()) throw ConfigError("person " + persons_[p].id + ": malformed plan");
      for (std::size_t a = 0; a + 1 < plan.activities.size(); ++a)
        if (!plan.activities[a].end_time)
          throw ConfigError("person " + persons_[p].id + ": missing activity end time");
      for (std::size_t l = 0; l < plan.legs.size(); ++l) {
        const PlanLeg& leg = plan.legs[l];
        if (leg.mode != Mode::car) continue;
        if (!persons_[p].car_owner)
          throw ConfigError("person " + persons_[p].id + ": car leg without car ownership");
        check_route(persons_[p].id, plan.activities[l].link, plan.activities[l + 1].link, leg.route);
      }
    }
  }

  void check_route(const std::string& pid, LinkIdx origin, LinkIdx dest,
                   const std::vector<LinkIdx>& route) const {
    if (route.empty()) {
      if (origin == dest || net_.links[origin].to == net_.links[dest].from) return;
      throw ConfigError("person " + pid + ": car leg missing route");
    }
    NodeIdx at = net_.links[origin].to;
    for (LinkIdx l : route) {
      if (net_.links[l].from != at) throw ConfigError("person " + pid + ": discontinuous route");
      at = net_.links[l].to;
    }
    if (at != net_.links[dest].from)
      throw ConfigError("person " + pid + ": route misses destination");
  }

  // ---- person phase ----

  void schedule_act_end(PersonIdx p, Time when) { act_end_heap_.push({when, p}); }
  void schedule_arrival(PersonIdx p, Time when) { arrival_heap_.push({when, p}); }
  void emit(Event e) { result_.events.emit(e); }

  void step_persons(Time t) {
    while (!act_end_heap_.empty() && act_end_heap_.top().first <= t) {
      PersonIdx p = act_end_heap_.top().second;
      act_end_heap_.pop();
      begin_leg(p, t);
    }
    while (!arrival_heap_.empty() && arrival_heap_.top().first <= t) {
      PersonIdx p = arrival_heap_.top().second;
      arrival_heap_.pop();
      complete_leg(p, t);
    }
  }

  void begin_leg(PersonIdx p, Time t) {
    detail::PersonState& st = states_[p];
    const Plan& plan = *plans_[p];
    const PlanActivity& act = plan.activities[st.act];
    const PlanLeg& leg = plan.legs[st.act];
    const PlanActivity& next = plan.activities[st.act + 1];

    result_.experiences[p].activities.push_back({act.act_type, static_cast<double>(t - st.arrived)});
    emit({t, EventKind::act_end, p, VehicleRef::none(), act.link, -1,
          static_cast<std::int16_t>(act.act_type)});
    emit({t, EventKind::depart, p, VehicleRef::none(), act.link, -1,
          static_cast<std::int16_t>(leg.mode)});
    result_.legs_by_mode[static_cast<std::size_t>(leg.mode)] += 1;
    st.leg_departed = t;

    switch (leg.mode) {
      case Mode::walk:
      case Mode::pt: {
        double arr = teleport_arrival(cfg_.teleport, leg.mode, beeline(act.link, next.link),
                                      static_cast<double>(t));
        schedule_arrival(p, static_cast<Time>(std::ceil(arr)));
        break;
      }
      case Mode::car:
        st.route = &leg.route;
        st.route_pos = 0;
        if (leg.route.empty())
          complete_leg(p, t);
        else
          request_entry(VehicleRef::car(p), leg.route[0], t);
        break;
      case Mode::sav:
        submit_request(p, act.link, next.link, t);
        break;
    }
  }

  void complete_leg(PersonIdx p, Time t) {
    detail::PersonState& st = states_[p];
    const Plan& plan = *plans_[p];
    const PlanLeg& leg = plan.legs[st.act];
    const PlanActivity& next = plan.activities[st.act + 1];

    record_leg(p, st.act, t);
    emit({t, EventKind::person_arrives, p, VehicleRef::none(), next.link, -1,
          static_cast<std::int16_t>(leg.mode)});

    st.act += 1;
    st.arrived = t;
    if (st.act + 1 == plan.activities.size()) {
      st.done = true;
      pending_persons_ -= 1;
    } else {
      schedule_act_end(p, std::max(*plan.activities[st.act].end_time, t));
    }
  }

  double beeline(LinkIdx a, LinkIdx b) const {
    if (a == b) return 0;
    return net_.beeline_m(net_.links[a].to, net_.links[b].from);
  }

  void record_leg(PersonIdx p, std::size_t leg_idx, Time arrived) {
    const Plan& plan = *plans_[p];
    const PlanLeg& leg = plan.legs[leg_idx];
    detail::PersonState& st = states_[p];
    LegExperience xp;
    xp.mode = leg.mode;
    double total = static_cast<double>(arrived - st.leg_departed);
    switch (leg.mode) {
      case Mode::walk:
        xp.in_vehicle_s = total;
        break;
      case Mode::pt:
        xp.in_vehicle_s = total;
        xp.cost_eur = cfg_.fares.pt_flat;
        break;
      case Mode::car: {
        xp.in_vehicle_s = total;
        double m = 0;
        for (LinkIdx l : leg.route) m += net_.links[l].length_m;
        xp.cost_eur = cfg_.fares.car_per_km * m / 1000.0;
        xp.parking_at_dest =
            parking_by_link.empty() ? true : parking_by_link[plan.activities[leg_idx + 1].link];
        break;
      }
      case Mode::sav: {
        const Request& r = requests_[st.last_request];
        if (r.status == RequestStatus::rejected) {
          xp.in_vehicle_s = total;
          xp.sav_rejected = true;
        } else {
          xp.wait_s = static_cast<double>(r.picked_up_at - r.submitted);
          xp.in_vehicle_s = static_cast<double>(arrived - r.picked_up_at);
          xp.cost_eur =
              fare(cfg_.fares,
                   cfg_.ridesharing ? FareVariant::sav_shared : FareVariant::sav_individual,
                   r.direct_distance_m / 1000.0);
          if (r.extended_detour)
            xp.detour_excess_s =
                std::max(0.0, xp.in_vehicle_s - cfg_.dispatch.detour_factor * r.direct_time_s);
        }
        break;
      }
    }
    result_.experiences[p].legs.push_back(xp);
  }

  void finalize_experiences() {
    for (PersonIdx p = 0; p < persons_.size(); ++p) {
      const Plan& plan = *plans_[p];
      PlanExperience& xp = result_.experiences[p];
      detail::PersonState& st = states_[p];
      if (plan.activities.size() == 1) {
        xp.activities.push_back({plan.activities[0].act_type, double(kSecondsPerDay)});
        continue;
      }
      if (!st.done) {
        xp.stranded = true;
        result_.stranded += 1;
        continue;
      }
      // the final activity runs until the 24h day wraps; when its type matches
      // the first activity (overnight home) the two merge into one
      double last = std::max(0.0, static_cast<double>(kSecondsPerDay - st.arrived));
      if (plan.activities.front().act_type == plan.activities.back().act_type &&
          !xp.activities.empty()) {
        xp.activities.front().performed_s += last;
      } else {
        xp.activities.push_back({plan.activities.back().act_type, last});
      }
    }
  }

  // ---- SAV requests ----

  void submit_request(PersonIdx p, LinkIdx origin, LinkIdx dest, Time t) {
    detail::PersonState& st = states_[p];
    Request req;
    req.idx = static_cast<RequestIdx>(requests_.size());
    req.person = p;
    req.origin = origin;
    req.destination = dest;
    req.submitted = t;
    auto path = shortest_path(net_, profile_, origin, dest, static_cast<double>(t), Mode::sav);
    if (path) {
      req.direct_time_s = path->travel_time;
      req.direct_distance_m = path->distance_m;
    }
    st.last_request = req.idx;
    emit({t, EventKind::request_submitted, p, VehicleRef::none(), origin,
          static_cast<std::int64_t>(req.idx), -1, req.direct_time_s, true});

    std::optional<Dispatcher::Insertion> ins;
    if (path) ins = dispatcher_.find_best_insertion(req, fleet_, requests_, static_cast<double>(t));
    if (!ins) {
      req.status = RequestStatus::rejected;
      requests_.push_back(req);
      emit({t, EventKind::request_rejected, p, VehicleRef::none(), origin,
            static_cast<std::int64_t>(req.idx)});
      // fall back to a teleport at pt speed so the day stays feasible; the
      // plan keeps mode sav and carries the rejection penalty in scoring
      double arr =
          teleport_arrival(cfg_.teleport, Mode::pt, beeline(origin, dest), static_cast<double>(t));
      schedule_arrival(p, static_cast<Time>(std::ceil(arr)));
      return;
    }

    req.status = RequestStatus::scheduled;
    req.extended_detour = ins->flagged;
    req.vehicle = ins->vehicle;
    requests_.push_back(req);
    apply_insertion(*ins, requests_.back());
    emit({t, EventKind::request_scheduled, p, VehicleRef::sav(ins->vehicle), origin,
          static_cast<std::int64_t>(req.idx), -1, ins->flagged ? 1.0 : 0.0, true});
  }

  void apply_insertion(const Dispatcher::Insertion& ins, const Request& req) {
    SavVehicle& v = fleet_[ins.vehicle];
    v.stops = Dispatcher::with_insertion(v.stops, req, ins.pickup_pos, ins.dropoff_pos);
    if (v.relocating) {
      v.relocating = false;
      v.relocation_target = kInvalidIdx;
    }
    if (v.phase == VehiclePhase::driving) v.reroute_needed = true;
  }

  // ---- fleet phase ----

  bool all_vehicles_idle() const {
    for (const SavVehicle& v : fleet_)
      if (v.phase != VehiclePhase::idle) return false;
    return true;
  }

  void step_fleet(Time t) {
    for (SavVehicle& v : fleet_) {
      if (v.phase == VehiclePhase::stopping && t >= v.stop_until) finish_stop(v, t);
      if (v.phase == VehiclePhase::idle && !v.stops.empty()) begin_drive(v, t, false);
      if (v.phase == VehiclePhase::driving && v.reroute_needed && !v.on_network)
        reroute_waiting_vehicle(v, t);
    }
  }

  LinkIdx drive_target(const SavVehicle& v) const {
    return v.relocating ? v.relocation_target : v.stops.front().link;
  }

  void begin_drive(SavVehicle& v, Time t, bool relocation) {
    v.relocating = relocation;
    v.phase = VehiclePhase::driving;
    v.reroute_needed = false;
    emit({t, EventKind::task_start, -1, VehicleRef::sav(v.idx), v.cur_link});
    set_drive_path(v, t);
  }

  void set_drive_path(SavVehicle& v, Time t) {
    auto path =
        shortest_path(net_, profile_, v.cur_link, drive_target(v), static_cast<double>(t), Mode::sav);
    if (!path) throw InvariantViolation("SAV drive target unreachable from current position");
    v.drive_path = std::move(path->links);
    v.path_pos = 0;
    v.on_network = false;
    if (v.drive_path.empty())
      arrive_vehicle(v, t);
    else
      request_entry(VehicleRef::sav(v.idx), v.drive_path[0], t);
  }

  /// Drive completion: the vehicle now stands at its target link.
  void arrive_vehicle(SavVehicle& v, Time t) {
    v.cur_link = drive_target(v);
    v.on_network = false;
    v.drive_path.clear();
    emit({t, EventKind::task_end, -1, VehicleRef::sav(v.idx), v.cur_link});
    if (v.relocating) {
      v.relocating = false;
      v.relocation_target = kInvalidIdx;
      become_idle(v, t);
      return;
    }
    begin_stop(v, t);
  }

  void begin_stop(SavVehicle& v, Time t) {
    v.active_stop = v.stops.front();
    v.stops.erase(v.stops.begin());
    v.phase = VehiclePhase::stopping;
    v.stop_until = t + static_cast<Time>(cfg_.dispatch.stop_seconds);
    emit({t, EventKind::task_start, -1, VehicleRef::sav(v.idx), v.cur_link});
    // passengers alight at stop begin
    for (RequestIdx rid : v.active_stop->dropoffs) {
      Request& r = requests_[rid];
      r.status = RequestStatus::completed;
      r.dropped_off_at = t;
      emit({t, EventKind::passenger_dropoff, r.person, VehicleRef::sav(v.idx), v.cur_link,
            static_cast<std::int64_t>(rid)});
      v.onboard.erase(std::find(v.onboard.begin(), v.onboard.end(), rid));
      complete_leg(r.person, t);
    }
  }

  void finish_stop(SavVehicle& v, Time t) {
    // passengers board at stop end
    for (RequestIdx rid : v.active_stop->pickups) {
      Request& r = requests_[rid];
      r.status = RequestStatus::picked_up;
      r.picked_up_at = t;
      v.onboard.push_back(rid);
      emit({t, EventKind::passenger_pickup, r.person, VehicleRef::sav(v.idx), v.cur_link,
            static_cast<std::int64_t>(rid)});
    }
    if (static_cast<int>(v.onboard.size()) > v.capacity)
      throw InvariantViolation("vehicle over capacity");
    v.active_stop.reset();
    emit({t, EventKind::task_end, -1, VehicleRef::sav(v.idx), v.cur_link});
    if (!v.stops.empty())
      begin_drive(v, t, false);
    else
      become_idle(v, t);
  }

  void become_idle(SavVehicle& v, Time t) {
    v.phase = VehiclePhase::idle;
    v.idle_since = t;
  }

  /// Diversion before the vehicle entered its first link: cancel the queued
  /// entry and re-path from the standing position.
  void reroute_waiting_vehicle(SavVehicle& v, Time t) {
    if (!v.drive_path.empty()) {
      auto& entries = links_[v.drive_path[0]].entries;
      auto it = std::find(entries.begin(), entries.end(), VehicleRef::sav(v.idx));
      if (it != entries.end()) entries.erase(it);
    }
    v.reroute_needed = false;
    set_drive_path(v, t);
  }

  // ---- rebalancing ----

  void step_rebalance(Time t) {
    std::vector<int> estimate =
        demand_history_ ? demand_history_->estimate(t, cfg_.rebalance.demand_horizon_s)
                        : std::vector<int>(static_cast<std::size_t>(grid_->num_cells()), 0);
    auto assignments = rebalance(fleet_, estimate, cfg_.rebalance, *grid_, t);
    for (const RelocationAssignment& a : assignments) {
      SavVehicle& v = fleet_[a.vehicle];
      v.relocation_target = a.target_link;
      emit({t, EventKind::relocation_start, -1, VehicleRef::sav(v.idx), v.cur_link});
      begin_drive(v, t, true);
    }
  }

  // ---- network phase ----

  Time traversal_time(LinkIdx l) const {
    return std::max<Time>(1, static_cast<Time>(std::ceil(net_.links[l].free_flow_time())));
  }

  int effective_storage(LinkIdx l) const {
    return std::max(1, static_cast<int>(std::llround(net_.storage(l) * cfg_.sample_rate)));
  }

  double capacity_per_second(LinkIdx l) const {
    return net_.links[l].capacity_vph * cfg_.sample_rate / 3600.0;
  }

  void request_entry(VehicleRef ref, LinkIdx first_link, Time t) {
    links_[first_link].entries.push_back(ref);
    wake(first_link, t);
  }

  void wake(LinkIdx l, Time when) { wakeups_.push({when, l}); }

  void step_network(Time t) {
    while (!wakeups_.empty() && wakeups_.top().first <= t) {
      LinkIdx l = wakeups_.top().second;
      Time when = wakeups_.top().first;
      wakeups_.pop();
      while (!wakeups_.empty() && wakeups_.top().first == when && wakeups_.top().second == l)
        wakeups_.pop();  // collapse duplicates
      process_link(l, t);
    }
  }

  void process_link(LinkIdx l, Time t) {
    detail::LinkState& ls = links_[l];
    double cps = capacity_per_second(l);
    double cap = std::max(1.0, cps);
    if (t > ls.budget_time) {
      ls.budget = std::min(cap, ls.budget + cps * static_cast<double>(t - ls.budget_time));
      ls.budget_time = t;
    }

    // FIFO head may leave once its traversal time elapsed, the outflow budget
    // covers it, and the next link (if any) has storage space
    while (!ls.queue.empty()) {
      auto [ref, earliest_exit] = ls.queue.front();
      if (earliest_exit > t) {
        wake(l, earliest_exit);
        break;
      }
      if (ls.budget < 1.0) {
        wake(l, t + 1);
        break;
      }
      std::optional<LinkIdx> next = peek_next_link(ref);
      if (next && links_[*next].storage_used >= effective_storage(*next)) {
        wake(l, t + 1);  // blocked by downstream storage; retry next step
        break;
      }
      ls.queue.pop_front();
      ls.budget -= 1.0;
      ls.storage_used -= 1;
      emit({t, EventKind::link_leave, person_of(ref), ref, l});
      if (next)
        enter_link(ref, *next, t);
      else
        vehicle_arrived(ref, t);
    }

    // admit pending entries into this link
    while (!ls.entries.empty() && ls.storage_used < effective_storage(l)) {
      VehicleRef ref = ls.entries.front();
      ls.entries.pop_front();
      enter_link(ref, l, t);
    }
    if (!ls.entries.empty()) wake(l, t + 1);
  }

  void enter_link(VehicleRef ref, LinkIdx l, Time t) {
    detail::LinkState& ls = links_[l];
    ls.storage_used += 1;
    ls.queue.push_back({ref, t + traversal_time(l)});
    emit({t, EventKind::link_enter, person_of(ref), ref, l});
    wake(l, t + traversal_time(l));
    if (ref.is_sav()) {
      SavVehicle& v = fleet_[ref.sav_index()];
      v.cur_link = l;
      v.link_entered = t;
      v.on_network = true;
      v.path_pos += 1;  // next path index to enter
      v.driven_m += net_.links[l].length_m;
    } else {
      states_[ref.car_person()].route_pos += 1;
    }
  }

  std::int64_t person_of(VehicleRef ref) const {
    return ref.is_car() ? static_cast<std::int64_t>(ref.car_person()) : -1;
  }

  /// The link a vehicle will take after leaving its current one, or nullopt on
  /// arrival. Dispatcher diversions are applied here, at the link boundary;
  /// the re-path is committed immediately so repeated peeks while blocked stay
  /// consistent.
  std::optional<LinkIdx> peek_next_link(VehicleRef ref) {
    if (ref.is_car()) {
      detail::PersonState& st = states_[ref.car_person()];
      if (st.route_pos < st.route->size()) return (*st.route)[st.route_pos];
      return std::nullopt;
    }
    SavVehicle& v = fleet_[ref.sav_index()];
    if (v.reroute_needed) {
      v.reroute_needed = false;
      auto path = shortest_path(net_, profile_, v.cur_link, drive_target(v),
                                static_cast<double>(now_), Mode::sav);
      if (!path) throw InvariantViolation("SAV drive target unreachable after diversion");
      v.drive_path = std::move(path->links);
      v.path_pos = 0;
    }
    if (v.path_pos < v.drive_path.size()) return v.drive_path[v.path_pos];
    return std::nullopt;
  }

  void vehicle_arrived(VehicleRef ref, Time t) {
    if (ref.is_car()) {
      complete_leg(ref.car_person(), t);
    } else {
      SavVehicle& v = fleet_[ref.sav_index()];
      v.on_network = false;
      arrive_vehicle(v, t);
    }
  }

  const Network& net_;
  const TravelTimeProfile& profile_;
  const std::vector<Person>& persons_;
  const std::vector<const Plan*>& plans_;
  std::vector<SavVehicle> fleet_;
  MobsimConfig cfg_;
  const DemandEstimator* demand_history_;
  const CellGrid* grid_;
  TravelTimeOracle oracle_;
  Dispatcher dispatcher_;

  std::vector<detail::LinkState> links_;
  std::vector<detail::PersonState> states_;
  std::vector<Request> requests_;
  DayResult result_;
  Time now_ = 0;
  std::size_t pending_persons_ = 0;

  using TimedPerson = std::pair<Time, PersonIdx>;
  std::priority_queue<TimedPerson, std::vector<TimedPerson>, std::greater<>> act_end_heap_;
  std::priority_queue<TimedPerson, std::vector<TimedPerson>, std::greater<>> arrival_heap_;
  std::priority_queue<std::pair<Time, LinkIdx>, std::vector<std::pair<Time, LinkIdx>>,
                      std::greater<>>
      wakeups_;
};

/// Runs one simulated day.
inline DayResult run_day(const Network& net, const TravelTimeProfile& profile,
                         const std::vector<Person>& persons, const std::vector<const Plan*>& plans,
                         std::vector<SavVehicle> fleet, const MobsimConfig& cfg,
                         const DemandEstimator* demand_history = nullptr,
                         const CellGrid* grid = nullptr,
                         const std::vector<bool>& parking_by_link = {}) {
  Mobsim sim(net, profile, persons, plans, std::move(fleet), cfg, demand_history, grid);
  sim.parking_by_link = parking_by_link;
  return sim.run();
}

}  // namespace savsim
