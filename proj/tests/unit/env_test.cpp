// Copyright 2026 The epirl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "epirl.hpp"

namespace epirl {
namespace {

Config env_config(const std::string& kind = "continuous", double threshold = 50) {
  Config c;
  c.population.pop_size = 2000;
  c.env.action_space_kind = kind;
  c.env.activation_threshold = threshold;
  validate(c);
  return c;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

TEST(Env, ResetIsDeterministic) {
  EpidemicEnv a(env_config());
  EpidemicEnv b(env_config());
  EXPECT_EQ(a.reset(42), b.reset(42));
}

TEST(Env, InitialObservationReflectsSeeding) {
  const Config c = env_config();
  EpidemicEnv env(c);
  const auto obs = env.reset(1);
  EXPECT_EQ(obs.counts[0], double(c.population.pop_size - seeded_agent_count(c.population)));
  EXPECT_EQ(obs.counts[0] + obs.counts[1] + obs.counts[2] + obs.counts[3] + obs.counts[4],
            double(c.population.pop_size));
}

TEST(Env, NormalizedStocksSumToOne) {
  const Config c = env_config();
  EpidemicEnv env(c);
  auto obs = env.reset(1);
  for (int k = 0; k < 5; ++k) {
    const auto f = obs.features(c.env, env.population());
    ASSERT_EQ(f.size(), 8u);
    EXPECT_NEAR(f[0] + f[1] + f[2] + f[3] + f[4], 1.0, 1e-12);
    obs = env.step(Action{0.8, 0.5, 0.5}).observation;
  }
}

TEST(Env, SeventhDimensionCanBeDropped) {
  Config c = env_config();
  c.env.observe_diagnoses = false;
  EpidemicRlEnv env(c);
  EXPECT_EQ(env.observation_dim(), 7u);
  EXPECT_EQ(env.reset(1).size(), 7u);
}

TEST(Env, NineteenStepsThenDone) {
  EpidemicEnv env(env_config());
  env.reset(2);
  int steps = 0;
  StepResult r;
  while (!env.done()) {
    r = env.step(Action{1.0, 0.0, 0.0});
    ++steps;
    EXPECT_EQ(r.done, steps == 19);
  }
  EXPECT_EQ(steps, 19);
  EXPECT_EQ(r.info.days.size(), 133u - 18 * 7);
  EXPECT_THROW(env.step(Action{1.0, 0.0, 0.0}), ProtocolError);
}

TEST(Env, StepBeforeResetIsAProtocolError) {
  EpidemicEnv env(env_config());
  EXPECT_THROW(env.step(Action{1.0, 0.0, 0.0}), ProtocolError);
}

TEST(Env, OutOfDomainActions) {
  EpidemicEnv cont(env_config());
  cont.reset(1);
  EXPECT_THROW(cont.step(Action{0.4, 0.0, 0.0}), ActionDomainError);
  EpidemicEnv disc(env_config("discrete"));
  disc.reset(1);
  EXPECT_THROW(disc.step(Action{0.9, 0.0, 0.0}), ActionDomainError);
  EXPECT_THROW(disc.step(std::size_t{64}), ActionDomainError);
}

TEST(Env, GatingAppliesNullActionUntilThreshold) {
  EpidemicEnv env(env_config("continuous", 50));
  env.reset(3);
  bool was_active = false;
  while (!env.done()) {
    const auto r = env.step(Action{0.5, 0.75, 0.75});
    if (!r.info.activated) {
      EXPECT_FALSE(was_active) << "activation is permanent";
      EXPECT_EQ(r.info.applied_action, kNullAction);
      for (const auto& a : r.info.daily_actions) EXPECT_EQ(a, kNullAction);
    } else {
      was_active = true;
      EXPECT_EQ(r.info.applied_action, (Action{0.5, 0.75, 0.75}));
    }
    EXPECT_EQ(r.info.raw_action, (Action{0.5, 0.75, 0.75}));
  }
}

TEST(Env, ZeroThresholdActivatesImmediately) {
  EpidemicEnv env(env_config("continuous", 0));
  env.reset(3);
  EXPECT_TRUE(env.step(Action{0.6, 0.0, 0.0}).info.activated);
}

TEST(Env, SchedulesAreGatedToo) {
  EpidemicEnv env(env_config("continuous", 1e9));
  env.reset(3);
  const auto sched = seven_work_seven_lockdown();
  while (!env.done()) {
    for (const auto& a : env.step(sched).info.daily_actions) EXPECT_EQ(a, kNullAction);
  }
}

TEST(Env, UngatedScheduleReplaysDailyActions) {
  EpidemicEnv env(env_config("continuous", 0));
  env.reset(3);
  const auto sched = seven_work_seven_lockdown();
  std::vector<Action> days;
  while (!env.done()) {
    const auto r = env.step(sched);
    days.insert(days.end(), r.info.daily_actions.begin(), r.info.daily_actions.end());
  }
  for (std::size_t d = 0; d < days.size(); ++d) EXPECT_EQ(days[d], sched.at(static_cast<Day>(d)));
  EXPECT_EQ(days[0].ch_beta, 1.0);
  EXPECT_EQ(days[7].ch_beta, 0.2);
  EXPECT_EQ(days[14].ch_beta, 1.0);
}

TEST(Env, RepeatedActionHasNoPenalty) {
  EpidemicEnv env(env_config("continuous", 0));
  env.reset(3);
  env.step(Action{0.7, 0.3, 0.3});
  const auto r = env.step(Action{0.7, 0.3, 0.3});
  ASSERT_TRUE(r.info.penalty);
  EXPECT_EQ(*r.info.penalty, 0.0);
  const auto jump = env.step(Action{0.7, 0.8, 0.3});
  EXPECT_NEAR(*jump.info.penalty, -30.0, 1e-9);
}

TEST(Env, DiscreteStepsCarryNoPenalty) {
  EpidemicEnv env(env_config("discrete", 0));
  env.reset(3);
  EXPECT_FALSE(env.step(std::size_t{0}).info.penalty);
}

TEST(Env, RewardDecomposesFromDiagnostics) {
  for (const auto* kind : {"continuous", "discrete"}) {
    Config c = env_config(kind, 0);
    c.rewards.lambda1 = 0.7;
    c.rewards.lambda2 = 1.3;
    c.rewards.lambda3 = 2.0;
    EpidemicEnv env(c);
    env.reset(5);
    Rng rng(1);
    while (!env.done()) {
      const std::size_t idx = rng.below(64);
      const auto r = std::string(kind) == "discrete" ? env.step(idx) : env.step(encode_discrete(idx));
      double h = 0.0, e = 0.0;
      for (std::size_t d = 0; d < r.info.days.size(); ++d) {
        h += health_reward(r.info.days[d], c.rewards);
        e += economic_reward(r.info.days[d], r.info.daily_actions[d], c.rewards, 2000).r_E_scaled;
      }
      double expect = c.rewards.lambda1 * h + c.rewards.lambda2 * e;
      if (r.info.penalty) expect += c.rewards.lambda3 * *r.info.penalty;
      EXPECT_TRUE(close_rel(r.reward, expect, 1e-9)) << r.reward << " vs " << expect;
    }
  }
}

TEST(Env, ObservationMatchesLastDayAndCumulativesGrow) {
  EpidemicEnv env(env_config("continuous", 0));
  auto prev = env.reset(6);
  while (!env.done()) {
    const auto r = env.step(Action{0.9, 0.6, 0.6});
    EXPECT_EQ(r.observation, Observation::from(r.info.days.back()));
    for (int k = 5; k < 8; ++k) EXPECT_GE(r.observation.counts[k], prev.counts[k]);
    prev = r.observation;
  }
}

TEST(Env, TraceRecordCarriesTheStep) {
  EpidemicEnv env(env_config("continuous", 0));
  env.reset(6);
  std::ostringstream os;
  write_trace_line(os, env.step(Action{0.9, 0.6, 0.6}));
  const auto j = json::parse(os.str());
  EXPECT_EQ(j.at("step"), 0);
  EXPECT_EQ(j.at("days").size(), 7u);
  EXPECT_EQ(j.at("applied_action"), json::array({0.9, 0.6, 0.6}));
  EXPECT_TRUE(j.at("reward_components").contains("penalty"));
}

TEST(Env, DiscreteEncodingEnds) {
  EXPECT_EQ(encode_discrete(0), (Action{0.5, 0.0, 0.0}));
  EXPECT_EQ(encode_discrete(63), (Action{0.875, 0.75, 0.75}));
}

TEST(Env, RlAdapterSpecs) {
  EpidemicRlEnv cont(env_config());
  EXPECT_EQ(cont.action_spec().dims(), 3u);
  EXPECT_EQ(cont.action_spec().low[0], 0.5);
  EpidemicRlEnv disc(env_config("discrete"));
  EXPECT_EQ(disc.action_spec().n, 64u);
  EXPECT_THROW(EpidemicRlEnv::to_action(AgentAction{std::vector<double>{1.0}}), ActionDomainError);
}

// --- baselines ---------------------------------------------------------------

TEST(Baselines, SevenWorkSevenLockdownPeriod) {
  const auto s = seven_work_seven_lockdown();
  for (Day d = 0; d < 60; ++d) {
    EXPECT_EQ(s.at(d).ch_beta, (d / 7) % 2 ? 0.2 : 1.0) << d;
    EXPECT_EQ(s.at(d), s.at(d + 14));
  }
}

TEST(Baselines, UkScheduleFileMatchesBuiltin) {
  const auto file = real_world_schedule(std::string(EPIRL_SOURCE_DIR) + "/data/uk_approx_schedule.csv");
  const auto builtin = uk_approx_schedule();
  for (Day d = 0; d < 133; ++d) EXPECT_EQ(file.at(d), builtin.at(d));
}

TEST(Baselines, ScheduleParsingErrors) {
  const auto late = parse_schedule(csv::read_string("day,ch_beta,ch_tp,ch_ctp\n3,0.5,0,0\n", "s"), "s");
  EXPECT_EQ(late.at(2), kNullAction);
  EXPECT_EQ(late.at(3).ch_beta, 0.5);
  EXPECT_THROW(parse_schedule(csv::read_string("day,ch_beta,ch_tp,ch_ctp\n0,1.5,0,0\n", "s"), "s"), ParseError);
  EXPECT_THROW(parse_schedule(csv::read_string("day,ch_beta,ch_tp,ch_ctp\n0,1,0,0\n0,1,0,0\n", "s"), "s"),
               ParseError);
  EXPECT_THROW(SchedulePolicy(std::vector<SchedulePolicy::Entry>{{0, {1.0, 1.5, 0.0}}}), ActionDomainError);
  EXPECT_THROW(schedule_by_name("/nonexistent.csv"), ParseError);
}

TEST(Baselines, NullPolicyEqualsNoIntervention) {
  const Config c = env_config();
  const auto a = run_episode(schedule_eval_policy("null", constant_policy(kNullAction)), c, 9);
  const auto b = run_episode(schedule_eval_policy("none", SchedulePolicy()), c, 9);
  EXPECT_EQ(a.series, b.series);
  EXPECT_EQ(a.series, run_simulation(SimulationConfig::from(c), 9, c.n_days));
}

}  // namespace
}  // namespace epirl
