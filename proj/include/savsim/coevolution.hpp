#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "savsim/common.hpp"
#include "savsim/mobsim.hpp"
#include "savsim/population_types.hpp"
#include "savsim/router.hpp"
#include "savsim/scoring.hpp"

namespace savsim {

/// Per-person memory of up to `capacity` scored plans with one selected.
/// Adding beyond capacity evicts the worst-scored unselected plan.
class PlanMemory {
 public:
  explicit PlanMemory(std::size_t capacity = 5) : capacity_(capacity) {}

  std::vector<Plan> plans;
  std::size_t selected = 0;

  std::size_t capacity() const { return capacity_; }
  Plan& selected_plan() { return plans[selected]; }
  const Plan& selected_plan() const { return plans[selected]; }

  /// Adds a plan and selects it, evicting the worst-scored unselected plan
  /// when the memory is full. Unscored plans never get evicted before being
  /// tried.
  void add_and_select(Plan plan) {
    if (plans.size() >= capacity_) {
      std::size_t worst = plans.size();
      double worst_score = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < plans.size(); ++i) {
        if (i == selected || !plans[i].score) continue;
        if (*plans[i].score < worst_score) {
          worst_score = *plans[i].score;
          worst = i;
        }
      }
      if (worst == plans.size()) worst = selected == 0 ? 1 : 0;  // all unscored: evict any other
      plans.erase(plans.begin() + static_cast<std::ptrdiff_t>(worst));
      if (selected > worst) selected -= 1;
    }
    plans.push_back(std::move(plan));
    selected = plans.size() - 1;
  }
};

struct StrategyWeights {
  double reroute = 0.3;
  double mode_mutation = 0.5;
  double time_mutation = 0.2;
  double innovation_cutoff = 0.8;  // fraction of total iterations

  void validate() const {
    if (reroute < 0 || mode_mutation < 0 || time_mutation < 0)
      throw ConfigError("strategy weights must be nonnegative");
    if (reroute + mode_mutation + time_mutation <= 0)
      throw ConfigError("strategy weights must not all be zero");
  }
};

/// Multinomial-logit selection over memorized scores: P(i) ~ exp(beta * s_i).
/// Unscored plans are treated as strictly preferred (they get tried first);
/// beta -> infinity degenerates to argmax.
inline std::size_t select_plan(const PlanMemory& memory, std::mt19937_64& rng, double beta) {
  if (memory.plans.empty()) throw InvariantViolation("select_plan: empty memory");
  for (std::size_t i = 0; i < memory.plans.size(); ++i)
    if (!memory.plans[i].score) return i;
  double best = -std::numeric_limits<double>::infinity();
  for (const Plan& p : memory.plans) best = std::max(best, *p.score);
  std::vector<double> w;
  w.reserve(memory.plans.size());
  for (const Plan& p : memory.plans) w.push_back(std::exp(beta * (*p.score - best)));
  return weighted_draw(rng, w);
}

/// Flips the mode of one whole tour (home-to-home segment) to a uniformly
/// drawn feasible mode and drops stale car routes for rerouting.
inline void mutate_mode(Plan& plan, const Person& person, int home_type, std::mt19937_64& rng) {
  if (plan.legs.empty()) return;
  // tours = leg ranges between consecutive home activities
  std::vector<std::pair<std::size_t, std::size_t>> tours;
  std::size_t start = 0;
  for (std::size_t a = 1; a < plan.activities.size(); ++a) {
    if (plan.activities[a].act_type == home_type) {
      tours.push_back({start, a});  // legs [start, a)
      start = a;
    }
  }
  if (tours.empty()) tours.push_back({0, plan.legs.size()});

  auto [lo, hi] = tours[static_cast<std::size_t>(
      uniform_int(rng, 0, static_cast<int>(tours.size()) - 1))];
  std::vector<Mode> feasible = {Mode::pt, Mode::walk, Mode::sav};
  if (person.car_owner) feasible.push_back(Mode::car);
  Mode mode = feasible[static_cast<std::size_t>(
      uniform_int(rng, 0, static_cast<int>(feasible.size()) - 1))];
  for (std::size_t l = lo; l < hi && l < plan.legs.size(); ++l) {
    plan.legs[l].mode = mode;
    plan.legs[l].route.clear();
  }
}

/// Shifts one activity's end time uniformly within +-bound seconds, clamped to
/// keep end times strictly ordered.
inline void mutate_time(Plan& plan, std::mt19937_64& rng, Time bound = 600) {
  if (plan.activities.size() < 2) return;
  int mutable_count = static_cast<int>(plan.activities.size()) - 1;
  std::size_t k = static_cast<std::size_t>(uniform_int(rng, 0, mutable_count - 1));
  Time shift = static_cast<Time>(uniform_int(rng, static_cast<int>(-bound), static_cast<int>(bound)));
  Time value = *plan.activities[k].end_time + shift;
  Time lower = k > 0 ? *plan.activities[k - 1].end_time + 1 : 1;
  Time upper = std::numeric_limits<Time>::max();
  if (k + 2 < plan.activities.size()) upper = *plan.activities[k + 1].end_time - 1;
  upper = std::max(upper, lower);
  plan.activities[k].end_time = std::clamp(value, lower, upper);
}

/// Recomputes the routes of all car legs with the given profile.
inline void reroute_car_legs(Plan& plan, const Network& net, const TravelTimeProfile& profile) {
  for (std::size_t l = 0; l < plan.legs.size(); ++l) {
    if (plan.legs[l].mode != Mode::car) continue;
    LinkIdx from = plan.activities[l].link;
    LinkIdx to = plan.activities[l + 1].link;
    double depart = plan.activities[l].end_time ? static_cast<double>(*plan.activities[l].end_time)
                                                : 8.0 * 3600;
    auto path = shortest_path(net, profile, from, to, depart, Mode::car);
    if (!path) throw ConfigError("car leg endpoints are not connected for mode car");
    plan.legs[l].route = std::move(path->links);
  }
}

struct IterationStats {
  int iteration = 0;
  double mean_executed_score = 0;
  std::array<double, 4> mode_share_pct{};  // by Mode
  long sav_requests = 0;
  long sav_served = 0;
  long sav_rejected = 0;
  double sav_mean_wait_s = 0;
  int stranded = 0;
};

struct EquilibriumConfig {
  int iterations = 100;
  std::size_t memory_size = 5;
  double innovation_fraction = 0.2;
  double select_beta = 1.0;
  StrategyWeights strategies;
  Time time_mutation_bound_s = 600;
  std::uint64_t seed = 1;
};

struct EquilibriumResult {
  std::vector<IterationStats> iterations;
  DayResult final_day;
  std::vector<PlanMemory> memories;
  double convergence_stat = 0;  // relative change of the mean executed score
                                // over the last 10% of iterations
};

/// Relative spread (max-min over |mean|) of the last `window` values.
inline double relative_spread(const std::vector<double>& values, std::size_t window) {
  if (values.empty() || window == 0) return 0;
  std::size_t begin = values.size() > window ? values.size() - window : 0;
  double lo = values[begin], hi = values[begin], sum = 0;
  std::size_t n = 0;
  for (std::size_t i = begin; i < values.size(); ++i, ++n) {
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
    sum += values[i];
  }
  double mean = sum / static_cast<double>(n);
  return (hi - lo) / std::max(1e-9, std::abs(mean));
}

/// The outer co-evolutionary loop: execute day -> score -> replan -> select,
/// with innovation switched off after the configured cutoff. Scenario wiring
/// (network, fleet seeding, zones) is provided by the caller.
class Equilibrium {
 public:
  Equilibrium(const Network& net, const ScoringParams& scoring, const std::vector<Person>& persons,
              std::vector<PlanMemory> initial_memories, const MobsimConfig& mobsim_cfg,
              const EquilibriumConfig& cfg, std::vector<SavVehicle> fleet_seed,
              const CellGrid* grid, int home_type, const std::vector<bool>& parking_by_link)
      : net_(net),
        scoring_(scoring),
        persons_(persons),
        memories_(std::move(initial_memories)),
        mobsim_cfg_(mobsim_cfg),
        cfg_(cfg),
        fleet_seed_(std::move(fleet_seed)),
        grid_(grid),
        home_type_(home_type),
        parking_by_link_(parking_by_link) {}

  EquilibriumResult run() {
    EquilibriumResult result;
    TravelTimeProfile profile;  // free flow on the first iteration
    DemandEstimator history(grid_ ? grid_->num_cells() : 1);
    std::vector<double> means;

    for (int iter = 0; iter < cfg_.iterations; ++iter) {
      // route-complete all selected plans
      for (PersonIdx p = 0; p < persons_.size(); ++p) {
        Plan& plan = memories_[p].selected_plan();
        for (std::size_t l = 0; l < plan.legs.size(); ++l)
          if (plan.legs[l].mode == Mode::car && plan.legs[l].route.empty())
            route_leg(plan, l, profile);
      }

      std::vector<const Plan*> selected;
      selected.reserve(persons_.size());
      for (PersonIdx p = 0; p < persons_.size(); ++p)
        selected.push_back(&memories_[p].selected_plan());

      DayResult day = run_day(net_, profile, persons_, selected, fleet_seed_, mobsim_cfg_,
                              iter > 0 ? &history : nullptr, grid_, parking_by_link_);

      // score executed plans
      double mean = 0;
      for (PersonIdx p = 0; p < persons_.size(); ++p) {
        double s = score_plan(scoring_, persons_[p], day.experiences[p]);
        memories_[p].selected_plan().score = s;
        mean += s;
      }
      mean /= std::max<std::size_t>(1, persons_.size());
      means.push_back(mean);
      result.iterations.push_back(stats_for(iter, mean, day));

      // feedback for the next iteration
      profile = TravelTimeProfile::from_events(net_, day.events, profile.bin_seconds());
      history = DemandEstimator(grid_ ? grid_->num_cells() : 1);
      if (grid_) {
        for (const Request& r : day.requests)
          history.add_history(r.submitted, grid_->cell_of_link(r.origin));
        history.finalize();
      }

      if (iter + 1 == cfg_.iterations) {
        result.final_day = std::move(day);
        break;
      }
      replan(iter, profile);
    }

    result.convergence_stat = relative_spread(
        means, std::max<std::size_t>(1, static_cast<std::size_t>(cfg_.iterations / 10)));
    result.memories = std::move(memories_);
    return result;
  }

 private:
  IterationStats stats_for(int iter, double mean, const DayResult& day) const {
    IterationStats s;
    s.iteration = iter;
    s.mean_executed_score = mean;
    long total_legs = 0;
    for (long n : day.legs_by_mode) total_legs += n;
    for (std::size_t m = 0; m < 4; ++m)
      s.mode_share_pct[m] =
          total_legs ? 100.0 * static_cast<double>(day.legs_by_mode[m]) / static_cast<double>(total_legs) : 0;
    double wait_sum = 0;
    long served = 0;
    for (const Request& r : day.requests) {
      s.sav_requests += 1;
      if (r.status == RequestStatus::rejected) {
        s.sav_rejected += 1;
      } else if (r.picked_up_at >= 0) {
        served += 1;
        wait_sum += static_cast<double>(r.picked_up_at - r.submitted);
      }
    }
    s.sav_served = served;
    s.sav_mean_wait_s = served ? wait_sum / static_cast<double>(served) : 0;
    s.stranded = day.stranded;
    return s;
  }

  void route_leg(Plan& plan, std::size_t l, const TravelTimeProfile& profile) {
    LinkIdx from = plan.activities[l].link;
    LinkIdx to = plan.activities[l + 1].link;
    double depart = static_cast<double>(*plan.activities[l].end_time);
    auto path = shortest_path(net_, profile, from, to, depart, Mode::car);
    if (!path) throw ConfigError("car leg endpoints are not connected for mode car");
    plan.legs[l].route = std::move(path->links);
  }

  void replan(int iter, const TravelTimeProfile& profile) {
    bool innovate_allowed =
        iter + 1 < static_cast<int>(cfg_.strategies.innovation_cutoff * cfg_.iterations);
    for (PersonIdx p = 0; p < persons_.size(); ++p) {
      auto rng = make_rng(cfg_.seed, 0x7e91ab3c5d2f00ull + p, static_cast<std::uint64_t>(iter));
      PlanMemory& mem = memories_[p];
      bool innovate = innovate_allowed && uniform_real(rng, 0, 1) < cfg_.innovation_fraction;
      if (!innovate) {
        mem.selected = select_plan(mem, rng, cfg_.select_beta);
        continue;
      }
      Plan mutant = mem.selected_plan();
      mutant.score.reset();
      double r = uniform_real(
          rng, 0, cfg_.strategies.reroute + cfg_.strategies.mode_mutation + cfg_.strategies.time_mutation);
      if (r < cfg_.strategies.reroute) {
        reroute_car_legs(mutant, net_, profile);
      } else if (r < cfg_.strategies.reroute + cfg_.strategies.mode_mutation) {
        mutate_mode(mutant, persons_[p], home_type_, rng);
      } else {
        mutate_time(mutant, rng, cfg_.time_mutation_bound_s);
      }
      for (std::size_t l = 0; l < mutant.legs.size(); ++l)
        if (mutant.legs[l].mode == Mode::car && mutant.legs[l].route.empty())
          route_leg(mutant, l, profile);
      mem.add_and_select(std::move(mutant));
    }
  }

  const Network& net_;
  const ScoringParams& scoring_;
  const std::vector<Person>& persons_;
  std::vector<PlanMemory> memories_;
  MobsimConfig mobsim_cfg_;
  EquilibriumConfig cfg_;
  std::vector<SavVehicle> fleet_seed_;
  const CellGrid* grid_;
  int home_type_;
  std::vector<bool> parking_by_link_;
};

}  // namespace savsim
