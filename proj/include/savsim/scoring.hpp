#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "savsim/common.hpp"
#include "savsim/population_types.hpp"

namespace savsim {

/// Parameters of one activity type. Utility of performing follows the
/// logarithmic form beta_dur * t_typ * ln(dur / t_0) with t_0 = t_typ * e^-1,
/// clamped from below at the t_0 score (zero), so short activities score 0
/// rather than diverging.
struct ActivityParams {
  double typical_duration_s = 0;
  double beta_duration_per_h = 6.0;  // utils/h

  double minimal_duration_s() const { return typical_duration_s * std::exp(-1.0); }
};

struct ModeParams {
  double asc = 0;                 // utils
  double beta_travel_per_h = -6;  // utils/h, <= 0
};

/// Sociodemographic multipliers on the SAV leg's marginal time and cost
/// parameters. Rules are matched first-to-last; empty fields are wildcards;
/// unmatched persons get factor 1.0.
struct TasteRule {
  std::optional<SocProf> socprof;
  std::optional<Gender> gender;
  std::optional<int> age_band;     // index into ScoringParams::age_band_bounds
  std::optional<int> income_band;  // ordinal, 0-based
  double f_time = 1.0;
  double f_cost = 1.0;
};

struct TasteFactors {
  double f_time = 1.0;
  double f_cost = 1.0;
};

enum class FareVariant : std::uint8_t { sav_individual, sav_shared };

struct FareScheme {
  double sav_individual_per_km = 0.50;
  double sav_shared_per_km = 0.40;
  double car_per_km = 0.30;
  double pt_flat = 1.50;
};

struct ScoringParams {
  std::vector<std::string> activity_types;
  std::vector<ActivityParams> activities;  // parallel to activity_types
  ModeParams mode_car{.asc = 0, .beta_travel_per_h = -6};
  ModeParams mode_pt{.asc = 0, .beta_travel_per_h = -6};
  ModeParams mode_walk{.asc = 0, .beta_travel_per_h = -12};
  ModeParams mode_sav{.asc = 0, .beta_travel_per_h = -6};
  double beta_cost_per_eur = 1.0;    // > 0, applied to negative cost terms
  double wait_multiplier = 1.5;      // SAV waiting weight on beta_travel
  double car_ownership_bonus = 0;    // utils added to car legs
  double parking_penalty = -1.0;     // utils added when no parking at destination
  double rejection_penalty = -20.0;  // utils, once per rejected SAV request
  double extended_detour_per_h = 6;  // utils/h of ride time beyond alpha * tau_d
  double stranded_penalty = -200.0;  // plan could not finish within the horizon
  std::vector<int> age_band_bounds = {14, 18, 30, 45, 60, 75};  // upper-exclusive bounds
  std::vector<TasteRule> taste_rules;
  FareScheme fares;

  int activity_index(const std::string& type) const {
    for (std::size_t i = 0; i < activity_types.size(); ++i)
      if (activity_types[i] == type) return static_cast<int>(i);
    return -1;
  }

  int age_band(int age) const {
    for (std::size_t i = 0; i < age_band_bounds.size(); ++i)
      if (age < age_band_bounds[i]) return static_cast<int>(i);
    return static_cast<int>(age_band_bounds.size());
  }

  const ModeParams& mode(Mode m) const {
    switch (m) {
      case Mode::car: return mode_car;
      case Mode::pt: return mode_pt;
      case Mode::walk: return mode_walk;
      case Mode::sav: return mode_sav;
    }
    return mode_car;
  }

  TasteFactors taste(const Person& p) const {
    int band = age_band(p.age);
    for (const TasteRule& r : taste_rules) {
      if (r.socprof && *r.socprof != p.socprof) continue;
      if (r.gender && *r.gender != p.gender) continue;
      if (r.age_band && *r.age_band != band) continue;
      if (r.income_band && *r.income_band != p.income_band) continue;
      return {r.f_time, r.f_cost};
    }
    return {};
  }
};

inline double fare(const FareScheme& fares, FareVariant variant, double direct_distance_km) {
  // Shared rides are billed on direct (not realized) distance as well; the
  // variant only selects the per-km price.
  double per_km =
      variant == FareVariant::sav_individual ? fares.sav_individual_per_km : fares.sav_shared_per_km;
  return per_km * direct_distance_km;
}

inline double score_activity(const ScoringParams& params, int act_type, double performed_s) {
  if (act_type < 0 || act_type >= static_cast<int>(params.activities.size()))
    throw ConfigError("score_activity: unknown activity type");
  const ActivityParams& a = params.activities[static_cast<std::size_t>(act_type)];
  double t0 = a.minimal_duration_s();
  if (performed_s <= t0) return 0;  // clamp at the t_0 score
  return a.beta_duration_per_h * (a.typical_duration_s / 3600.0) * std::log(performed_s / t0);
}

/// Scores one executed leg. Times in seconds, cost in euros. For SAV legs the
/// marginal time/cost parameters are multiplied by the person's taste factors
/// and waiting is weighted by the configured multiplier; other modes fold
/// waiting into in-vehicle time upstream.
inline double score_leg(const ScoringParams& params, const Person& person, Mode mode,
                        double in_vehicle_s, double wait_s, double detour_excess_s, double cost_eur,
                        bool parking_at_dest = true) {
  const ModeParams& mp = params.mode(mode);
  double ivt_h = in_vehicle_s / 3600.0;
  double wait_h = wait_s / 3600.0;
  double u = mp.asc;
  if (mode == Mode::sav) {
    TasteFactors f = params.taste(person);
    u += f.f_time * mp.beta_travel_per_h * ivt_h;
    u += params.wait_multiplier * f.f_time * mp.beta_travel_per_h * wait_h;
    u -= f.f_cost * params.beta_cost_per_eur * cost_eur;
    u -= params.extended_detour_per_h * (detour_excess_s / 3600.0);
  } else if (mode == Mode::car) {
    if (!person.car_owner)
      throw InvariantViolation("car leg scored for a person without a car");
    u += mp.beta_travel_per_h * (ivt_h + wait_h);
    u -= params.beta_cost_per_eur * cost_eur;
    u += params.car_ownership_bonus;
    if (!parking_at_dest) u += params.parking_penalty;
  } else {
    u += mp.beta_travel_per_h * (ivt_h + wait_h);
    u -= params.beta_cost_per_eur * cost_eur;
  }
  return u;
}

/// What one executed leg looked like, as recorded by the mobsim.
struct LegExperience {
  Mode mode = Mode::walk;
  double in_vehicle_s = 0;
  double wait_s = 0;
  double detour_excess_s = 0;  // ride time beyond alpha * tau_d, flagged SAV rides only
  double cost_eur = 0;
  bool parking_at_dest = true;
  bool sav_rejected = false;
};

struct ActivityExperience {
  int act_type = -1;
  double performed_s = 0;
};

struct PlanExperience {
  std::vector<ActivityExperience> activities;
  std::vector<LegExperience> legs;
  bool stranded = false;
};

inline double score_plan(const ScoringParams& params, const Person& person,
                         const PlanExperience& xp) {
  double total = 0;
  for (const auto& a : xp.activities) total += score_activity(params, a.act_type, a.performed_s);
  for (const auto& l : xp.legs) {
    total += score_leg(params, person, l.mode, l.in_vehicle_s, l.wait_s, l.detour_excess_s,
                       l.cost_eur, l.parking_at_dest);
    if (l.sav_rejected) total += params.rejection_penalty;
  }
  if (xp.stranded) total += params.stranded_penalty;
  return total;
}

}  // namespace savsim
