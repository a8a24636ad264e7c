#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "savsim/common.hpp"
#include "savsim/csv.hpp"
#include "savsim/network.hpp"
#include "savsim/population_types.hpp"

namespace savsim {

/// Control attribute names used throughout: the joint age-band x gender
/// marginal, the income-band marginal, and the socio-professional marginal.
inline constexpr const char* kAttrAgeGender = "age_gender";
inline constexpr const char* kAttrIncome = "income";
inline constexpr const char* kAttrSocprof = "socprof";

inline int age_band_of(int age, const std::vector<int>& bounds) {
  for (std::size_t i = 0; i < bounds.size(); ++i)
    if (age < bounds[i]) return static_cast<int>(i);
  return static_cast<int>(bounds.size());
}

inline std::string control_level(const std::string& attribute, const Person& p,
                                 const std::vector<int>& age_bounds) {
  if (attribute == kAttrAgeGender)
    return "a" + std::to_string(age_band_of(p.age, age_bounds)) + "_" + gender_name(p.gender);
  if (attribute == kAttrIncome) return "i" + std::to_string(p.income_band);
  if (attribute == kAttrSocprof) return socprof_name(p.socprof);
  throw ConfigError("unknown control attribute: " + attribute);
}

/// Marginal counts per attribute level for one zone.
struct ZoneControls {
  std::string zone;
  std::map<std::string, std::map<std::string, long>> marginals;  // attribute -> level -> count

  long total(const std::string& attribute) const {
    long n = 0;
    auto it = marginals.find(attribute);
    if (it == marginals.end()) return 0;
    for (const auto& [level, count] : it->second) n += count;
    return n;
  }
};

inline std::vector<ZoneControls> load_controls(const std::string& path) {
  csv::Table t = csv::read_file(path);
  int cz = t.require_column("zone", path);
  int ca = t.require_column("attribute", path);
  int cl = t.require_column("level", path);
  int cc = t.require_column("count", path);
  std::vector<ZoneControls> out;
  std::map<std::string, std::size_t> index;
  for (const auto& r : t.rows) {
    auto [it, inserted] = index.emplace(r[cz], out.size());
    if (inserted) out.push_back({r[cz], {}});
    long count = csv::to_long(r[cc], path);
    if (count < 0) throw ConfigError(path + ": negative marginal count");
    out[it->second].marginals[r[ca]][r[cl]] += count;
  }
  return out;
}

inline void write_controls(const std::vector<ZoneControls>& controls, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& z : controls)
    for (const auto& [attr, levels] : z.marginals)
      for (const auto& [level, count] : levels)
        rows.push_back({z.zone, attr, level, std::to_string(count)});
  csv::write_file(path, {"zone", "attribute", "level", "count"}, rows);
}

struct SynthesisReportRow {
  std::string zone;
  std::string attribute;
  std::string level;
  long control = 0;
  long synthetic = 0;
  double rel_error = 0;
};

/// Per zone x attribute level relative errors of a synthetic population
/// against the controls: |synthetic - control| / max(control, 1).
inline std::vector<SynthesisReportRow> validate_synthesis(const std::vector<Person>& persons,
                                                          const std::vector<ZoneControls>& controls,
                                                          const std::vector<int>& age_bounds) {
  std::vector<SynthesisReportRow> report;
  for (const auto& zc : controls) {
    std::map<std::string, std::map<std::string, long>> counts;
    for (const auto& p : persons) {
      if (p.home_zone != zc.zone) continue;
      for (const auto& [attr, levels] : zc.marginals)
        counts[attr][control_level(attr, p, age_bounds)] += 1;
    }
    for (const auto& [attr, levels] : zc.marginals) {
      for (const auto& [level, target] : levels) {
        long got = counts[attr][level];
        report.push_back({zc.zone, attr, level, target, got,
                          std::abs(got - target) / std::max(1.0, static_cast<double>(target))});
      }
    }
  }
  return report;
}

/// Fitness-based population synthesis with multilevel controls: per zone the
/// socio-professional marginal is met exactly by stratified draws from the
/// seed sample, then greedy same-group swap-in/swap-out reduces the maximum
/// relative error of the remaining marginals below `epsilon`.
inline std::vector<Person> synthesize(const std::vector<Person>& seed,
                                      const std::vector<ZoneControls>& controls,
                                      std::mt19937_64& rng,
                                      const std::vector<int>& age_bounds,
                                      double epsilon = 0.05, double scale = 1.0) {
  if (seed.empty()) throw ConfigError("synthesize: empty seed sample");

  // every demanded control level must exist in the seed
  for (const auto& zc : controls) {
    for (const auto& [attr, levels] : zc.marginals) {
      for (const auto& [level, count] : levels) {
        if (count <= 0) continue;
        bool found = false;
        for (const auto& p : seed)
          if (control_level(attr, p, age_bounds) == level) {
            found = true;
            break;
          }
        if (!found)
          throw ConfigError("synthesize: seed lacks control category " + attr + "=" + level);
      }
    }
  }

  std::vector<std::vector<std::size_t>> by_group(kNumSocProf);
  for (std::size_t i = 0; i < seed.size(); ++i)
    by_group[static_cast<std::size_t>(seed[i].socprof)].push_back(i);

  std::vector<Person> out;
  for (const auto& zc : controls) {
    // scaled socprof targets via largest-remainder rounding
    auto sp_it = zc.marginals.find(kAttrSocprof);
    if (sp_it == zc.marginals.end())
      throw ConfigError("synthesize: zone " + zc.zone + " lacks socprof controls");
    std::vector<std::pair<SocProf, double>> exact;
    for (const auto& [level, count] : sp_it->second)
      exact.push_back({socprof_from_name(level), count * scale});
    long target_n = std::lround(zc.total(kAttrSocprof) * scale);
    std::vector<long> quota(exact.size());
    long assigned = 0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      quota[i] = static_cast<long>(std::floor(exact[i].second));
      assigned += quota[i];
    }
    std::vector<std::size_t> order(exact.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return exact[a].second - std::floor(exact[a].second) >
             exact[b].second - std::floor(exact[b].second);
    });
    for (std::size_t k = 0; assigned < target_n && k < order.size(); ++k, ++assigned)
      quota[order[k % order.size()]] += 1;

    std::vector<Person> pool;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      const auto& group = by_group[static_cast<std::size_t>(exact[i].first)];
      if (group.empty() && quota[i] > 0)
        throw ConfigError("synthesize: seed lacks control category socprof=" +
                          std::string(socprof_name(exact[i].first)));
      for (long k = 0; k < quota[i]; ++k)
        pool.push_back(seed[group[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(group.size()) - 1))]]);
    }

    // greedy swaps within socprof groups against age_gender / income controls
    auto errors = [&](const std::vector<Person>& p) {
      double max_err = 0, sum_err = 0;
      for (const auto& [attr, levels] : zc.marginals) {
        if (attr == kAttrSocprof) continue;
        std::map<std::string, long> counts;
        for (const auto& person : p) counts[control_level(attr, person, age_bounds)] += 1;
        for (const auto& [level, count] : levels) {
          double target = count * scale;
          double err = std::abs(counts[level] - target) / std::max(1.0, target);
          max_err = std::max(max_err, err);
          sum_err += err;
        }
      }
      return std::make_pair(max_err, sum_err);
    };

    auto [max_err, sum_err] = errors(pool);
    long budget = 60 * static_cast<long>(pool.size());
    for (long it = 0; it < budget && max_err > epsilon && !pool.empty(); ++it) {
      std::size_t slot = static_cast<std::size_t>(
          uniform_int(rng, 0, static_cast<int>(pool.size()) - 1));
      const auto& group = by_group[static_cast<std::size_t>(pool[slot].socprof)];
      Person candidate = seed[group[static_cast<std::size_t>(
          uniform_int(rng, 0, static_cast<int>(group.size()) - 1))]];
      Person old = pool[slot];
      pool[slot] = candidate;
      auto [new_max, new_sum] = errors(pool);
      if (new_max < max_err || (new_max == max_err && new_sum < sum_err)) {
        max_err = new_max;
        sum_err = new_sum;
      } else {
        pool[slot] = old;
      }
    }

    for (auto& p : pool) {
      p.home_zone = zc.zone;
      out.push_back(std::move(p));
    }
  }

  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = "p" + std::to_string(i);
  return out;
}

// ---------------------------------------------------------------------------
// activity chains

struct ChainTemplate {
  std::string id;
  SocProf group = SocProf::employed;
  double probability = 0;
  std::vector<int> act_types;        // indices into the activity-type table
  std::vector<double> end_mean_s;    // per non-final activity
  std::vector<double> end_sd_s;
};

inline void validate_templates(const std::vector<ChainTemplate>& templates,
                               const std::vector<std::string>& act_types, int home_type) {
  std::array<double, kNumSocProf> totals{};
  for (const auto& t : templates) {
    if (t.act_types.empty() || t.act_types.front() != home_type || t.act_types.back() != home_type)
      throw ConfigError("chain template " + t.id + ": must start and end at home");
    if (t.end_mean_s.size() + 1 != t.act_types.size() || t.end_sd_s.size() != t.end_mean_s.size())
      throw ConfigError("chain template " + t.id + ": time profile arity mismatch");
    for (int a : t.act_types)
      if (a < 0 || a >= static_cast<int>(act_types.size()))
        throw ConfigError("chain template " + t.id + ": unknown activity type");
    totals[static_cast<std::size_t>(t.group)] += t.probability;
  }
  for (int g = 0; g < kNumSocProf; ++g) {
    if (totals[static_cast<std::size_t>(g)] == 0) continue;
    if (std::abs(totals[static_cast<std::size_t>(g)] - 1.0) > 1e-9)
      throw ConfigError(std::string("chain templates: probabilities for group ") +
                        socprof_name(static_cast<SocProf>(g)) + " do not sum to 1");
  }
}

/// Draws a chain template from the person's group-conditional distribution and
/// samples activity end times from the template's normal time profiles,
/// clamped to stay strictly increasing.
inline Plan allocate_chain(const Person& person, const std::vector<ChainTemplate>& templates,
                           std::mt19937_64& rng) {
  std::vector<std::size_t> candidates;
  std::vector<double> weights;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    if (templates[i].group == person.socprof) {
      candidates.push_back(i);
      weights.push_back(templates[i].probability);
    }
  }
  if (candidates.empty())
    throw ConfigError(std::string("allocate_chain: no template for group ") +
                      socprof_name(person.socprof));
  const ChainTemplate& tpl = templates[candidates[weighted_draw(rng, weights)]];

  Plan plan;
  Time prev_end = 0;
  for (std::size_t a = 0; a < tpl.act_types.size(); ++a) {
    PlanActivity act;
    act.act_type = tpl.act_types[a];
    if (a + 1 < tpl.act_types.size()) {
      double drawn = std::normal_distribution<double>(tpl.end_mean_s[a], tpl.end_sd_s[a])(rng);
      Time end = std::max<Time>(prev_end + 1, static_cast<Time>(std::llround(drawn)));
      act.end_time = end;
      prev_end = end;
    }
    plan.activities.push_back(act);
  }
  plan.legs.assign(plan.activities.size() - 1,
                   PlanLeg{person.car_owner ? Mode::car : Mode::pt, {}});
  return plan;
}

// ---------------------------------------------------------------------------
// locations

/// Destination-zone distributions per (purpose, origin zone). Work and study
/// zones are drawn once per person (stable workplace / school); the other
/// purposes are drawn per activity occurrence from the OD matrix.
class OdMatrix {
 public:
  void add(int purpose, const std::string& origin_zone, const std::string& dest_zone, double p) {
    rows_[{purpose, origin_zone}].emplace_back(dest_zone, p);
  }

  void validate() const {
    for (const auto& [key, row] : rows_) {
      double total = 0;
      for (const auto& [zone, p] : row) total += p;
      if (std::abs(total - 1.0) > 1e-6)
        throw ConfigError("od matrix: probabilities for purpose " + std::to_string(key.first) +
                          " origin " + key.second + " sum to " + std::to_string(total));
    }
  }

  const std::string& draw(int purpose, const std::string& origin_zone,
                          std::mt19937_64& rng) const {
    auto it = rows_.find({purpose, origin_zone});
    if (it == rows_.end()) {
      it = rows_.find({purpose, std::string("*")});
      if (it == rows_.end())
        throw ConfigError("od matrix: no row for purpose " + std::to_string(purpose) +
                          " origin " + origin_zone);
    }
    std::vector<double> w;
    w.reserve(it->second.size());
    for (const auto& [zone, p] : it->second) w.push_back(p);
    return it->second[weighted_draw(rng, w)].first;
  }

  bool empty() const { return rows_.empty(); }

 private:
  std::map<std::pair<int, std::string>, std::vector<std::pair<std::string, double>>> rows_;
};

struct ZoneMap {
  std::vector<std::string> zones;                       // ordered zone ids
  std::map<std::string, std::vector<LinkIdx>> links;    // zone -> member links
  std::map<std::string, bool> parking;                  // parking availability
  std::vector<std::string> zone_of_link;                // per link

  const std::vector<LinkIdx>& links_in(const std::string& zone) const {
    auto it = links.find(zone);
    if (it == links.end() || it->second.empty())
      throw ConfigError("zone " + zone + " has no links");
    return it->second;
  }
};

inline ZoneMap load_zones(const Network& net, const std::string& path) {
  csv::Table t = csv::read_file(path);
  int cl = t.require_column("link", path);
  int cz = t.require_column("zone", path);
  int cp = t.require_column("parking", path);
  ZoneMap zm;
  zm.zone_of_link.assign(net.links.size(), "");
  for (const auto& r : t.rows) {
    LinkIdx l = net.link_index(r[cl]);
    if (zm.links.find(r[cz]) == zm.links.end()) zm.zones.push_back(r[cz]);
    zm.links[r[cz]].push_back(l);
    zm.parking[r[cz]] = csv::to_long(r[cp], path) != 0;
    zm.zone_of_link[l] = r[cz];
  }
  return zm;
}

inline void write_zones(const Network& net, const ZoneMap& zm, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& zone : zm.zones)
    for (LinkIdx l : zm.links.at(zone))
      rows.push_back({net.links[l].id, zone, zm.parking.at(zone) ? "1" : "0"});
  csv::write_file(path, {"link", "zone", "parking"}, rows);
}

/// Binds every activity of the chain to a link: home at the home zone,
/// work/study at a per-person zone drawn from the OD table, other purposes via
/// per-trip OD draws; the precise location is a uniformly random link within
/// the zone.
inline void assign_locations(const Person& person, Plan& plan, const OdMatrix& od,
                             const ZoneMap& zones, int home_type, int work_type, int study_type,
                             std::mt19937_64& rng) {
  auto pick_link = [&](const std::string& zone) {
    const auto& ls = zones.links_in(zone);
    return ls[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(ls.size()) - 1))];
  };

  LinkIdx home_link = pick_link(person.home_zone);
  std::optional<LinkIdx> work_link, study_link;
  std::string prev_zone = person.home_zone;
  for (auto& act : plan.activities) {
    if (act.act_type == home_type) {
      act.link = home_link;
      prev_zone = person.home_zone;
    } else if (act.act_type == work_type) {
      if (!work_link) work_link = pick_link(od.draw(work_type, person.home_zone, rng));
      act.link = *work_link;
      prev_zone = zones.zone_of_link[*work_link];
    } else if (act.act_type == study_type) {
      if (!study_link) study_link = pick_link(od.draw(study_type, person.home_zone, rng));
      act.link = *study_link;
      prev_zone = zones.zone_of_link[*study_link];
    } else {
      const std::string& dest_zone = od.draw(act.act_type, prev_zone, rng);
      act.link = pick_link(dest_zone);
      prev_zone = dest_zone;
    }
  }
}

// ---------------------------------------------------------------------------
// persistence

inline void write_population(const std::vector<Person>& persons, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : persons)
    rows.push_back({p.id, std::to_string(p.age), gender_name(p.gender),
                    std::to_string(p.income_band), socprof_name(p.socprof),
                    p.car_owner ? "1" : "0", p.home_zone});
  csv::write_file(path, {"id", "age", "gender", "income_band", "socprof", "car_owner", "home_zone"},
                  rows);
}

inline std::vector<Person> load_population(const std::string& path) {
  csv::Table t = csv::read_file(path);
  int ci = t.require_column("id", path);
  int ca = t.require_column("age", path);
  int cg = t.require_column("gender", path);
  int cb = t.require_column("income_band", path);
  int cs = t.require_column("socprof", path);
  int cc = t.require_column("car_owner", path);
  int cz = t.require_column("home_zone", path);
  std::vector<Person> out;
  for (const auto& r : t.rows) {
    Person p;
    p.id = r[ci];
    p.age = static_cast<int>(csv::to_long(r[ca], path));
    p.gender = gender_from_name(r[cg]);
    p.income_band = static_cast<int>(csv::to_long(r[cb], path));
    p.socprof = socprof_from_name(r[cs]);
    p.car_owner = csv::to_long(r[cc], path) != 0;
    p.home_zone = r[cz];
    if ((p.socprof == SocProf::under14) != (p.age < 14))
      throw ConfigError(path + ": person " + p.id + " age inconsistent with under14 group");
    out.push_back(std::move(p));
  }
  return out;
}

inline void write_plans(const std::vector<Person>& persons, const std::vector<Plan>& plans,
                        const Network& net, const std::vector<std::string>& act_types,
                        const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t p = 0; p < plans.size(); ++p) {
    const Plan& plan = plans[p];
    for (std::size_t a = 0; a < plan.activities.size(); ++a) {
      const auto& act = plan.activities[a];
      rows.push_back({persons[p].id, std::to_string(2 * a), "activity",
                      act_types[static_cast<std::size_t>(act.act_type)], net.links[act.link].id,
                      act.end_time ? std::to_string(*act.end_time) : ""});
      if (a < plan.legs.size())
        rows.push_back({persons[p].id, std::to_string(2 * a + 1), "leg",
                        mode_name(plan.legs[a].mode), "", ""});
    }
  }
  csv::write_file(path, {"person", "index", "kind", "type", "link", "end_time"}, rows);
}

}  // namespace savsim
