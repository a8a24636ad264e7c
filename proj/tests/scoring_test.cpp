#include "savsim/scoring.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace savsim;

namespace {

ScoringParams toy_params() {
  ScoringParams p;
  p.activity_types = {"home", "work"};
  p.activities = {{12 * 3600.0, 6.0}, {8 * 3600.0, 6.0}};
  p.mode_car = {0.0, -6.0};
  p.mode_pt = {-0.5, -6.0};
  p.mode_walk = {0.0, -12.0};
  p.mode_sav = {0.0, -6.0};
  p.beta_cost_per_eur = 0.5;
  p.wait_multiplier = 1.5;
  p.car_ownership_bonus = 0.3;
  p.parking_penalty = -1.0;
  p.rejection_penalty = -20.0;
  p.extended_detour_per_h = 6.0;
  return p;
}

Person owner() {
  Person p;
  p.id = "p0";
  p.age = 35;
  p.car_owner = true;
  return p;
}

}  // namespace

TEST(ScoreActivity, ZeroAtMinimalDuration) {
  ScoringParams p = toy_params();
  double t0 = p.activities[1].minimal_duration_s();
  EXPECT_DOUBLE_EQ(score_activity(p, 1, t0), 0.0);
}

TEST(ScoreActivity, LogFormHandEvaluated) {
  // beta=6 utils/h, t_typ=8 h, duration=8 h, t_0 = 8h/e -> 6 * 8 * ln(e) = 48
  ScoringParams p = toy_params();
  EXPECT_NEAR(score_activity(p, 1, 8 * 3600.0), 48.0, 1e-9);
}

TEST(ScoreActivity, ClampedBelowMinimalDuration) {
  ScoringParams p = toy_params();
  EXPECT_DOUBLE_EQ(score_activity(p, 1, 60.0), 0.0);
  EXPECT_DOUBLE_EQ(score_activity(p, 1, 0.0), 0.0);
}

TEST(ScoreActivity, UnknownTypeFails) {
  ScoringParams p = toy_params();
  EXPECT_THROW(score_activity(p, 99, 3600), ConfigError);
}

TEST(ScoreLeg, AscOnlyWhenEverythingZero) {
  ScoringParams p = toy_params();
  EXPECT_DOUBLE_EQ(score_leg(p, owner(), Mode::pt, 0, 0, 0, 0), -0.5);
}

TEST(ScoreLeg, SavHandSum) {
  // beta_tt=-6/h, ivt=0.5h, wait=0.2h, w=1.5, cost 4 EUR at beta_c=0.5:
  // 0 - 3 - 1.8 - 2 = -6.8
  ScoringParams p = toy_params();
  double got = score_leg(p, owner(), Mode::sav, 0.5 * 3600, 0.2 * 3600, 0, 4.0);
  EXPECT_NEAR(got, -6.8, 1e-12);
}

TEST(ScoreLeg, TasteFactorsCanFlipTheArgmax) {
  ScoringParams p = toy_params();
  Person keen = owner();
  ScoringParams doubled = p;
  doubled.taste_rules = {{{}, {}, {}, {}, 2.0, 1.0}};

  double sav_base = score_leg(p, keen, Mode::sav, 1800, 0, 0, 1.0);
  double pt_alt = score_leg(p, keen, Mode::pt, 3000, 0, 0, 1.5);
  EXPECT_GT(sav_base, pt_alt);  // SAV wins at factor 1

  double sav_doubled = score_leg(doubled, keen, Mode::sav, 1800, 0, 0, 1.0);
  EXPECT_LT(sav_doubled, pt_alt);  // doubling f_time flips the ranking
}

TEST(ScoreLeg, TasteMonotoneDiscouragement) {
  ScoringParams p = toy_params();
  Person someone = owner();
  double prev = score_leg(p, someone, Mode::sav, 1200, 300, 0, 2.0);
  for (double lambda : {1.5, 2.0, 4.0}) {
    ScoringParams q = p;
    q.taste_rules = {{{}, {}, {}, {}, lambda, lambda}};
    double now = score_leg(q, someone, Mode::sav, 1200, 300, 0, 2.0);
    EXPECT_LE(now, prev);
    prev = now;
  }
}

TEST(ScoreLeg, WaitWeightedAboveInVehicleTime) {
  ScoringParams p = toy_params();
  double all_ivt = score_leg(p, owner(), Mode::sav, 1800, 0, 0, 0);
  double shifted = score_leg(p, owner(), Mode::sav, 1500, 300, 0, 0);
  EXPECT_LT(shifted, all_ivt);  // same total, more waiting, strictly worse
}

TEST(ScoreLeg, CarForNonOwnerIsInvariantViolation) {
  ScoringParams p = toy_params();
  Person walker;
  walker.car_owner = false;
  EXPECT_THROW(score_leg(p, walker, Mode::car, 600, 0, 0, 1.0), InvariantViolation);
}

TEST(Fare, PaperPrices) {
  FareScheme fares;
  EXPECT_DOUBLE_EQ(fare(fares, FareVariant::sav_individual, 10.0), 5.00);
  EXPECT_DOUBLE_EQ(fare(fares, FareVariant::sav_shared, 10.0), 4.00);
  EXPECT_DOUBLE_EQ(fare(fares, FareVariant::sav_individual, 0.0), 0.0);
}

TEST(Fare, SharedBilledOnDirectDistance) {
  // 10 km direct, 12 km realized: the fare only sees the direct distance
  FareScheme fares;
  EXPECT_DOUBLE_EQ(fare(fares, FareVariant::sav_shared, 10.0), 4.00);
}

TEST(ScorePlan, SingleActivityOnly) {
  ScoringParams p = toy_params();
  PlanExperience xp;
  xp.activities = {{0, 12 * 3600.0}};
  EXPECT_DOUBLE_EQ(score_plan(p, owner(), xp), score_activity(p, 0, 12 * 3600.0));
}

TEST(ScorePlan, SumsComponents) {
  ScoringParams p = toy_params();
  PlanExperience xp;
  xp.activities = {{0, 10 * 3600.0}, {1, 8 * 3600.0}};
  xp.legs = {{Mode::car, 1800, 0, 0, 2.5, true, false}};
  double expected = score_activity(p, 0, 10 * 3600.0) + score_activity(p, 1, 8 * 3600.0) +
                    score_leg(p, owner(), Mode::car, 1800, 0, 0, 2.5, true);
  EXPECT_NEAR(score_plan(p, owner(), xp), expected, 1e-12);
}

TEST(ScorePlan, RejectionAddsPenaltyOnce) {
  ScoringParams p = toy_params();
  PlanExperience xp;
  xp.activities = {{0, 10 * 3600.0}, {0, 10 * 3600.0}};
  LegExperience leg;
  leg.mode = Mode::sav;
  leg.in_vehicle_s = 900;
  xp.legs = {leg};
  double base = score_plan(p, owner(), xp);
  xp.legs[0].sav_rejected = true;
  EXPECT_NEAR(score_plan(p, owner(), xp), base + p.rejection_penalty, 1e-12);
}

TEST(ScorePlan, AdditivityProperty) {
  ScoringParams p = toy_params();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    PlanExperience xp;
    int acts = uniform_int(rng, 1, 5);
    for (int a = 0; a < acts; ++a)
      xp.activities.push_back({uniform_int(rng, 0, 1), uniform_real(rng, 0, 12 * 3600)});
    int legs = acts - 1;
    double manual = 0;
    for (const auto& a : xp.activities) manual += score_activity(p, a.act_type, a.performed_s);
    for (int l = 0; l < legs; ++l) {
      LegExperience leg;
      leg.mode = static_cast<Mode>(uniform_int(rng, 0, 3));
      if (leg.mode == Mode::car) leg.mode = Mode::pt;  // keep person-agnostic
      leg.in_vehicle_s = uniform_real(rng, 0, 3600);
      leg.wait_s = leg.mode == Mode::sav ? uniform_real(rng, 0, 900) : 0;
      leg.cost_eur = uniform_real(rng, 0, 5);
      xp.legs.push_back(leg);
      manual += score_leg(p, owner(), leg.mode, leg.in_vehicle_s, leg.wait_s, 0, leg.cost_eur);
    }
    EXPECT_NEAR(score_plan(p, owner(), xp), manual, 1e-9);
  }
}

TEST(Taste, RuleMatchingAndDefault) {
  ScoringParams p = toy_params();
  p.taste_rules = {
      {SocProf::retired, {}, {}, {}, 1.4, 1.3},
      {{}, Gender::f, {}, {}, 1.1, 1.0},
  };
  Person retired_man;
  retired_man.socprof = SocProf::retired;
  retired_man.gender = Gender::m;
  retired_man.age = 70;
  EXPECT_DOUBLE_EQ(p.taste(retired_man).f_time, 1.4);

  Person young_woman;
  young_woman.socprof = SocProf::employed;
  young_woman.gender = Gender::f;
  young_woman.age = 30;
  EXPECT_DOUBLE_EQ(p.taste(young_woman).f_time, 1.1);

  Person unmatched;
  unmatched.socprof = SocProf::employed;
  unmatched.gender = Gender::m;
  EXPECT_DOUBLE_EQ(p.taste(unmatched).f_time, 1.0);
  EXPECT_DOUBLE_EQ(p.taste(unmatched).f_cost, 1.0);
}
