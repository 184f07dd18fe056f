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

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "epirl/action.hpp"
#include "epirl/baselines.hpp"
#include "epirl/config.hpp"
#include "epirl/rewards.hpp"
#include "epirl/rl.hpp"
#include "epirl/simulation.hpp"

namespace epirl {

// S, E, I, R, D, cumulative tests, cumulative quarantined, cumulative
// diagnoses; raw agent counts.
struct Observation {
  std::array<double, 8> counts{};

  static Observation from(const DailyCounts& c) {
    return {{static_cast<double>(c.S), static_cast<double>(c.E), static_cast<double>(c.I),
             static_cast<double>(c.R), static_cast<double>(c.D),
             static_cast<double>(c.cumulative_tests),
             static_cast<double>(c.cumulative_quarantined),
             static_cast<double>(c.cumulative_diagnoses)}};
  }

  // Network input: optionally divided by the population size, optionally
  // without the diagnoses component.
  std::vector<double> features(const EnvConfig& cfg, double population) const {
    const std::size_t n = cfg.observe_diagnoses ? 8 : 7;
    std::vector<double> f(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(n));
    if (cfg.observation_normalization) {
      for (double& v : f) v /= population;
    }
    return f;
  }

  bool operator==(const Observation&) const = default;
};

struct StepInfo {
  std::int32_t step = 0;
  Day first_day = 0;
  Action raw_action;
  Action applied_action;  // first day's action
  bool activated = false;
  std::vector<DailyCounts> days;
  std::vector<Action> daily_actions;
  std::vector<DailyReward> daily_rewards;
  double health_sum = 0.0;           // sum of r_H
  double economic_scaled_sum = 0.0;  // sum of scaled r_E
  std::optional<double> penalty;     // r_P, continuous mode only
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// Weekly-decision wrapper around Simulation. Actions take effect only once
// cumulative infections reach the activation threshold; before that the
// null action is applied whatever the input.
class EpidemicEnv {
 public:
  explicit EpidemicEnv(Config config) : config_(std::move(config)) { validate(config_); }

  const Config& config() const { return config_; }
  ActionSpaceKind kind() const { return config_.env.kind(); }
  double population() const { return static_cast<double>(config_.population.pop_size); }
  std::size_t observation_dim() const { return config_.env.observe_diagnoses ? 8 : 7; }

  Observation reset(std::uint64_t seed) {
    sim_ = std::make_unique<Simulation>(SimulationConfig::from(config_), seed);
    step_ = 0;
    done_ = false;
    activated_ = false;
    previous_applied_ = kNullAction;
    history_.clear();
    latest_ = sim_->snapshot();
    return Observation::from(latest_);
  }

  StepResult step(const Action& action) {
    validate_action(action, kind());
    require_running();
    const bool active = update_activation();
    const Action applied = active ? action : kNullAction;
    return advance(action, [&](Day) { return applied; }, active);
  }

  // Discrete convenience: index into the 64-way product.
  StepResult step(std::size_t discrete_index) { return step(encode_discrete(discrete_index)); }

  // Replays a schedule day by day for one step. Schedules skip the learning
  // action box but are gated like any other policy.
  StepResult step(const SchedulePolicy& schedule) {
    require_running();
    const bool active = update_activation();
    return advance(schedule.at(sim_->day()),
                   [&](Day d) { return active ? schedule.at(d) : kNullAction; }, active);
  }

  bool done() const { return done_; }
  bool activated() const { return activated_; }
  std::int32_t steps_taken() const { return step_; }
  Day day() const { return sim_ ? sim_->day() : 0; }
  const std::vector<DailyCounts>& history() const { return history_; }
  const Simulation& simulation() const { return *sim_; }

 private:
  void require_running() const {
    if (!sim_) throw ProtocolError("step() before reset()");
    if (done_) throw ProtocolError("step() after the episode is done");
  }

  bool update_activation() {
    if (!activated_ &&
        static_cast<double>(latest_.cumulative_infections) >= config_.env.activation_threshold) {
      activated_ = true;
    }
    return activated_;
  }

  StepResult advance(const Action& raw, const std::function<Action(Day)>& action_for_day,
                     bool active) {
    StepResult r;
    r.info.step = step_;
    r.info.first_day = sim_->day();
    r.info.raw_action = raw;
    r.info.activated = active;
    const Day end = std::min<Day>(sim_->day() + config_.env.step_days, config_.env.episode_days);
    while (sim_->day() < end) {
      const Action a = action_for_day(sim_->day());
      latest_ = sim_->step_day(a);
      history_.push_back(latest_);
      const DailyReward d = daily_reward(latest_, a, config_.rewards, population());
      r.info.days.push_back(latest_);
      r.info.daily_actions.push_back(a);
      r.info.daily_rewards.push_back(d);
      r.info.health_sum += d.r_H;
      r.info.economic_scaled_sum += d.economic.r_E_scaled;
      r.reward += d.combined;
    }
    r.info.applied_action = r.info.daily_actions.front();
    if (kind() == ActionSpaceKind::kContinuous) {
      r.info.penalty = action_penalty(r.info.applied_action, previous_applied_,
                                      ActionSpaceKind::kContinuous);
      r.reward += config_.rewards.lambda3 * *r.info.penalty;
    }
    previous_applied_ = r.info.applied_action;
    ++step_;
    done_ = sim_->day() >= config_.env.episode_days;
    r.done = done_;
    r.observation = Observation::from(latest_);
    return r;
  }

  Config config_;
  std::unique_ptr<Simulation> sim_;
  DailyCounts latest_;
  std::vector<DailyCounts> history_;
  Action previous_applied_ = kNullAction;
  std::int32_t step_ = 0;
  bool done_ = false;
  bool activated_ = false;
};

// Adapts EpidemicEnv to the agent-facing contract: continuous actions are
// vectors in the box, discrete actions are indices into the 64-way product.
class EpidemicRlEnv : public RlEnv {
 public:
  explicit EpidemicRlEnv(Config config) : env_(std::move(config)) {}

  std::size_t observation_dim() const override { return env_.observation_dim(); }

  ActionSpec action_spec() const override {
    ActionSpec spec;
    spec.kind = env_.kind();
    if (spec.kind == ActionSpaceKind::kDiscrete) {
      spec.n = action_space::kDiscreteSize;
    } else {
      spec.low.assign(action_space::kContinuousLow.begin(), action_space::kContinuousLow.end());
      spec.high.assign(action_space::kContinuousHigh.begin(), action_space::kContinuousHigh.end());
    }
    return spec;
  }

  std::vector<double> reset(std::uint64_t seed) override {
    return env_.reset(seed).features(env_.config().env, env_.population());
  }

  Transition step(const AgentAction& action) override {
    last_ = env_.step(to_action(action));
    return {last_.observation.features(env_.config().env, env_.population()), last_.reward,
            last_.done};
  }

  static Action to_action(const AgentAction& action) {
    if (const auto* idx = std::get_if<std::size_t>(&action)) return encode_discrete(*idx);
    const auto& v = std::get<std::vector<double>>(action);
    if (v.size() != 3) throw ActionDomainError("continuous action must have 3 components");
    return {v[0], v[1], v[2]};
  }

  EpidemicEnv& env() { return env_; }
  const StepResult& last_step() const { return last_; }

 private:
  EpidemicEnv env_;
  StepResult last_;
};

// One JSON line per step.
inline json step_record(const StepResult& r) {
  json days = json::array();
  for (std::size_t i = 0; i < r.info.days.size(); ++i) {
    const auto& c = r.info.days[i];
    const auto& d = r.info.daily_rewards[i];
    json row;
    const auto values = c.values();
    for (std::size_t k = 0; k < values.size(); ++k) {
      row[std::string(DailyCounts::kColumns[k])] = values[k];
    }
    row["action"] = r.info.daily_actions[i].as_array();
    row["r_H"] = d.r_H;
    row["r_E"] = d.economic.r_E;
    row["r_E_scaled"] = d.economic.r_E_scaled;
    row["economic_loss"] = d.loss;
    days.push_back(std::move(row));
  }
  json rec;
  rec["step"] = r.info.step;
  rec["first_day"] = r.info.first_day;
  rec["observation"] = r.observation.counts;
  rec["raw_action"] = r.info.raw_action.as_array();
  rec["applied_action"] = r.info.applied_action.as_array();
  rec["activated"] = r.info.activated;
  rec["reward"] = r.reward;
  rec["reward_components"] = {{"health", r.info.health_sum},
                              {"economic_scaled", r.info.economic_scaled_sum},
                              {"penalty", r.info.penalty ? json(*r.info.penalty) : json(nullptr)}};
  rec["done"] = r.done;
  rec["days"] = std::move(days);
  return rec;
}

inline void write_trace_line(std::ostream& os, const StepResult& r) { os << step_record(r).dump() << '\n'; }

}  // namespace epirl
