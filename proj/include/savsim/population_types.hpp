#pragma once

#include <optional>
#include <string>
#include <vector>

#include "savsim/common.hpp"

namespace savsim {

enum class Gender : std::uint8_t { m, f };

inline const char* gender_name(Gender g) { return g == Gender::m ? "m" : "f"; }
inline Gender gender_from_name(const std::string& s) {
  if (s == "m") return Gender::m;
  if (s == "f") return Gender::f;
  throw ConfigError("unknown gender: " + s);
}

enum class SocProf : std::uint8_t { employed, unemployed, student, under14, retired, homemaker };
constexpr int kNumSocProf = 6;

inline const char* socprof_name(SocProf s) {
  switch (s) {
    case SocProf::employed: return "employed";
    case SocProf::unemployed: return "unemployed";
    case SocProf::student: return "student";
    case SocProf::under14: return "under14";
    case SocProf::retired: return "retired";
    case SocProf::homemaker: return "homemaker";
  }
  return "?";
}

inline SocProf socprof_from_name(const std::string& s) {
  for (int i = 0; i < kNumSocProf; ++i)
    if (s == socprof_name(static_cast<SocProf>(i))) return static_cast<SocProf>(i);
  throw ConfigError("unknown socio-professional group: " + s);
}

struct Person {
  std::string id;
  int age = 0;
  Gender gender = Gender::m;
  int income_band = 0;  // ordinal, 0-based
  SocProf socprof = SocProf::employed;
  bool car_owner = false;
  std::string home_zone;
};

struct PlanActivity {
  int act_type = -1;            // index into ScoringParams::activity_types
  LinkIdx link = kInvalidIdx;   // activity location
  std::optional<Time> end_time; // unset for the final activity (open end)
};

struct PlanLeg {
  Mode mode = Mode::walk;
  std::vector<LinkIdx> route;  // car legs only; links strictly between endpoints
};

/// A day plan: activities and legs alternate, starting and ending with an
/// activity. legs[i] connects activities[i] and activities[i+1].
struct Plan {
  std::vector<PlanActivity> activities;
  std::vector<PlanLeg> legs;
  std::optional<double> score;

  bool valid_shape() const {
    return !activities.empty() && legs.size() + 1 == activities.size();
  }
};

}  // namespace savsim
