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

#include <filesystem>
#include <numeric>

#include "epirl.hpp"

namespace epirl {
namespace {

// Fixed-length episodes; each step pays the chosen arm's value, or for a
// continuous action 1 - (a - 0.7)^2 per component.
class BanditEnv : public RlEnv {
 public:
  BanditEnv(ActionSpaceKind kind, std::vector<double> arms, int length = 5)
      : kind_(kind), arms_(std::move(arms)), length_(length) {}

  std::size_t observation_dim() const override { return 2; }
  ActionSpec action_spec() const override {
    ActionSpec s;
    s.kind = kind_;
    if (kind_ == ActionSpaceKind::kDiscrete) {
      s.n = arms_.size();
    } else {
      s.low = {0.0};
      s.high = {1.0};
    }
    return s;
  }
  std::vector<double> reset(std::uint64_t) override {
    t_ = 0;
    return obs();
  }
  Transition step(const AgentAction& a) override {
    double r = 0.0;
    if (const auto* i = std::get_if<std::size_t>(&a)) {
      r = arms_.at(*i);
    } else {
      const double x = std::get<std::vector<double>>(a).at(0);
      r = arms_.empty() ? 0.0 : 1000.0 * (1.0 - (x - 0.7) * (x - 0.7));
    }
    ++t_;
    return {obs(), r, t_ >= length_};
  }

 private:
  std::vector<double> obs() const { return {1.0, double(t_) / length_}; }
  ActionSpaceKind kind_;
  std::vector<double> arms_;
  int length_;
  int t_ = 0;
};

EnvFactory bandit(ActionSpaceKind kind, std::vector<double> arms) {
  return [=] { return std::make_unique<BanditEnv>(kind, arms); };
}

Config fast_config() {
  Config c;
  c.ppo.n_steps = 20;
  c.ppo.batch_size = 10;
  c.ppo.learning_rate = 3e-3;
  c.ppo.hidden = {16};
  c.dqn.learning_starts = 10;
  c.dqn.batch_size = 8;
  c.dqn.learning_rate = 3e-3;
  c.dqn.target_update_interval = 20;
  c.dqn.hidden = {16};
  return c;
}

double tail_mean(const std::vector<double>& v, double frac) {
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(v.size() * frac));
  return std::accumulate(v.end() - static_cast<std::ptrdiff_t>(n), v.end(), 0.0) / double(n);
}

TEST(Training, ZeroEpisodes) {
  const auto dir = std::filesystem::temp_directory_path() / "epirl_train_zero";
  std::filesystem::remove_all(dir);
  TrainOptions opt;
  opt.checkpoint_dir = dir;
  const auto t = train(bandit(ActionSpaceKind::kDiscrete, {1, 2}), AgentKind::kPpo, fast_config(), opt);
  EXPECT_TRUE(t.curve().empty());
  EXPECT_TRUE(std::filesystem::exists(dir / "checkpoint_final.json"));
  std::filesystem::remove_all(dir);
}

TEST(Training, ZeroRewardGivesZeroCurve) {
  TrainOptions opt;
  opt.total_episodes = 30;
  for (auto kind : {AgentKind::kPpo, AgentKind::kDqn}) {
    const auto t = train(bandit(ActionSpaceKind::kDiscrete, {0, 0, 0}), kind, fast_config(), opt);
    ASSERT_EQ(t.curve().size(), 30u);
    for (double r : t.curve()) EXPECT_EQ(r, 0.0);
  }
}

TEST(Training, PpoSolvesDiscreteBandit) {
  TrainOptions opt;
  opt.total_episodes = 300;
  opt.seed = 1;
  const auto t = train(bandit(ActionSpaceKind::kDiscrete, {0, 200, 1000, 400}), AgentKind::kPpo,
                       fast_config(), opt);
  EXPECT_GE(tail_mean(t.curve(), 0.1), 0.95 * 5000);
}

TEST(Training, PpoSolvesContinuousBandit) {
  TrainOptions opt;
  opt.total_episodes = 400;
  opt.seed = 2;
  const auto t = train(bandit(ActionSpaceKind::kContinuous, {1}), AgentKind::kPpo, fast_config(), opt);
  EXPECT_GE(tail_mean(t.curve(), 0.1), 0.95 * 5000);
}

TEST(Training, DqnSolvesDiscreteBandit) {
  TrainOptions opt;
  opt.total_episodes = 300;
  opt.seed = 3;
  const auto t = train(bandit(ActionSpaceKind::kDiscrete, {0, 200, 1000, 400}), AgentKind::kDqn,
                       fast_config(), opt);
  // Greedy at the end of training, epsilon = 0.05 leaves some exploration.
  EXPECT_GE(tail_mean(t.curve(), 0.1), 0.95 * 5000 * 0.95);
}

TEST(Training, SeededRunsAreIdentical) {
  TrainOptions opt;
  opt.total_episodes = 25;
  opt.seed = 7;
  for (auto kind : {AgentKind::kPpo, AgentKind::kDqn}) {
    const auto f = bandit(ActionSpaceKind::kDiscrete, {1, 5, 2});
    EXPECT_EQ(train(f, kind, fast_config(), opt).curve(), train(f, kind, fast_config(), opt).curve());
  }
}

TEST(Training, ResumeContinuesExactly) {
  const auto dir = std::filesystem::temp_directory_path() / "epirl_train_resume";
  for (auto kind : {AgentKind::kPpo, AgentKind::kDqn}) {
    std::filesystem::remove_all(dir);
    const auto f = bandit(ActionSpaceKind::kDiscrete, {1, 5, 2});
    TrainOptions full;
    full.total_episodes = 24;
    full.seed = 4;
    full.checkpoint_interval = 13;  // mid-rollout for PPO
    full.checkpoint_dir = dir;
    const auto whole = train(f, kind, fast_config(), full);

    TrainOptions rest;
    rest.total_episodes = 24;
    rest.seed = 4;
    rest.resume = read_checkpoint((dir / "checkpoint_ep13.json").string());
    const auto resumed = train(f, kind, fast_config(), rest);
    EXPECT_EQ(resumed.curve(), whole.curve()) << to_string(kind);
    EXPECT_EQ(resumed.checkpoint().dump(), whole.checkpoint().dump());
  }
  std::filesystem::remove_all(dir);
}

TEST(Training, PeriodicCheckpoints) {
  const auto dir = std::filesystem::temp_directory_path() / "epirl_train_ckpt";
  std::filesystem::remove_all(dir);
  TrainOptions opt;
  opt.total_episodes = 10;
  opt.checkpoint_interval = 4;
  opt.checkpoint_dir = dir;
  train(bandit(ActionSpaceKind::kDiscrete, {1, 2}), AgentKind::kDqn, fast_config(), opt);
  EXPECT_TRUE(std::filesystem::exists(dir / "checkpoint_ep4.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "checkpoint_ep8.json"));
  EXPECT_FALSE(std::filesystem::exists(dir / "checkpoint_ep10.json"));
  const auto j = read_checkpoint((dir / "checkpoint_final.json").string());
  const auto t = load_trainer(j, bandit(ActionSpaceKind::kDiscrete, {1, 2}));
  EXPECT_EQ(t.curve().size(), 10u);
  EXPECT_THROW(read_checkpoint((dir / "nope.json").string()), Error);
  std::filesystem::remove_all(dir);
}

TEST(Training, DqnOnContinuousEnvIsAConfigError) {
  EXPECT_THROW(Trainer(bandit(ActionSpaceKind::kContinuous, {1}), AgentKind::kDqn, fast_config(), 1),
               ConfigError);
  EXPECT_THROW(parse_agent_kind("sac"), ConfigError);
}

TEST(Evaluation, EpidemicCheckpointRoundTrip) {
  Config c = fast_config();
  c.population.pop_size = 1000;
  TrainOptions opt;
  opt.total_episodes = 2;
  opt.seed = 1;
  const auto t = train(epidemic_env_factory(c), AgentKind::kPpo, c, opt);
  const auto loaded = load_trainer(json::parse(t.checkpoint().dump()), epidemic_env_factory(c));
  EXPECT_EQ(loaded.ppo().parameters(), t.ppo().parameters());
  const auto a = run_episode(agent_eval_policy("a", t.policy()), c, 5);
  const auto b = run_episode(agent_eval_policy("b", loaded.policy()), c, 5);
  EXPECT_EQ(a.series, b.series);
  EXPECT_EQ(a.total_return, b.total_return);
  EXPECT_EQ(a.daily_actions.size(), 133u);
}

TEST(Evaluation, DeterministicPerSeed) {
  Config c;
  c.population.pop_size = 1000;
  const auto p = schedule_eval_policy("7w7l", seven_work_seven_lockdown());
  const auto a = evaluate(p, c, {1, 2, 3});
  const auto b = evaluate(p, c, {1, 2, 3});
  ASSERT_EQ(a.episodes.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(a.episodes[i].series, b.episodes[i].series);
    EXPECT_EQ(a.episodes[i].total_return, b.episodes[i].total_return);
  }
  EXPECT_NE(a.episodes[0].series, a.episodes[1].series);
}

}  // namespace
}  // namespace epirl
