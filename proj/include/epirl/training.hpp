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

// Training loops, checkpoints and policy evaluation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "epirl/analysis.hpp"
#include "epirl/baselines.hpp"
#include "epirl/config.hpp"
#include "epirl/dqn.hpp"
#include "epirl/environment.hpp"
#include "epirl/logging.hpp"
#include "epirl/ppo.hpp"
#include "epirl/rl.hpp"

namespace epirl {

enum class AgentKind { kPpo, kDqn };

inline AgentKind parse_agent_kind(const std::string& s) {
  if (s == "ppo") return AgentKind::kPpo;
  if (s == "dqn") return AgentKind::kDqn;
  throw ConfigError("unknown agent '" + s + "' (expected ppo or dqn)");
}

inline std::string to_string(AgentKind k) { return k == AgentKind::kPpo ? "ppo" : "dqn"; }

using EnvFactory = std::function<std::unique_ptr<RlEnv>()>;

inline EnvFactory epidemic_env_factory(const Config& cfg) {
  return [cfg] { return std::make_unique<EpidemicRlEnv>(cfg); };
}

inline constexpr int kCheckpointVersion = 1;

// PPO transitions collected since the last update.
struct Rollout {
  PpoBatch batch;
  std::vector<double> values;
  std::vector<double> rewards;  // scaled
  std::vector<bool> dones;

  std::size_t size() const { return rewards.size(); }
  void clear() { *this = Rollout{}; }
};

struct TrainOptions {
  std::int64_t total_episodes = 0;
  std::uint64_t seed = 0;
  std::int64_t checkpoint_interval = 0;  // episodes; 0 = only the final one
  std::optional<std::filesystem::path> checkpoint_dir;
  std::optional<json> resume;  // a checkpoint document
  std::function<void(std::int64_t episode, double episode_return)> on_episode;
};

class Trainer {
 public:
  Trainer(EnvFactory factory, AgentKind kind, Config cfg, std::uint64_t seed)
      : factory_(std::move(factory)), kind_(kind), cfg_(std::move(cfg)), seed_(seed) {
    env_ = factory_();
    const ActionSpec spec = env_->action_spec();
    if (kind_ == AgentKind::kDqn) {
      if (spec.kind != ActionSpaceKind::kDiscrete) {
        throw ConfigError("DQN requires the discrete action space; set env.action_space_kind=discrete");
      }
      dqn_.emplace(env_->observation_dim(), spec, cfg_.dqn, seed_);
    } else {
      ppo_.emplace(env_->observation_dim(), spec, cfg_.ppo, seed_);
    }
  }

  AgentKind kind() const { return kind_; }
  const std::vector<double>& curve() const { return curve_; }
  std::int64_t episodes_done() const { return static_cast<std::int64_t>(curve_.size()); }
  PpoAgent& ppo() { return *ppo_; }
  DqnAgent& dqn() { return *dqn_; }
  const PpoAgent& ppo() const { return *ppo_; }
  const DqnAgent& dqn() const { return *dqn_; }

  // Runs episodes until `total_episodes` have been completed in all.
  void run(const TrainOptions& opt) {
    for (std::int64_t ep = episodes_done(); ep < opt.total_episodes; ++ep) {
      const double ret = kind_ == AgentKind::kPpo ? ppo_episode(ep) : dqn_episode(ep, opt.total_episodes);
      curve_.push_back(ret);
      if (opt.on_episode) opt.on_episode(ep, ret);
      if (opt.checkpoint_dir && opt.checkpoint_interval > 0 &&
          episodes_done() % opt.checkpoint_interval == 0) {
        save(*opt.checkpoint_dir / ("checkpoint_ep" + std::to_string(episodes_done()) + ".json"));
      }
    }
    if (opt.checkpoint_dir) save(*opt.checkpoint_dir / "checkpoint_final.json");
  }

  // Greedy policy over network features.
  std::function<AgentAction(const std::vector<double>&)> policy() const {
    if (kind_ == AgentKind::kPpo) {
      const PpoAgent* a = &*ppo_;
      return [a](const std::vector<double>& obs) { return a->act_deterministic(obs); };
    }
    const DqnAgent* a = &*dqn_;
    return [a](const std::vector<double>& obs) -> AgentAction { return a->greedy(obs); };
  }

  json checkpoint() const {
    json j;
    j["format"] = "epirl-checkpoint";
    j["version"] = kCheckpointVersion;
    j["agent"] = to_string(kind_);
    j["seed"] = seed_;
    j["config"] = cfg_;
    j["observation_dim"] = env_->observation_dim();
    j["action_space"] = to_string(env_->action_spec().kind);
    j["episode"] = episodes_done();
    j["curve"] = curve_;
    if (kind_ == AgentKind::kPpo) {
      const auto& a = *ppo_;
      j["shapes"] = {{"actor", a.actor().shapes()}, {"critic", a.critic().shapes()},
                     {"log_std", a.log_std().size()}};
      j["parameters"] = a.parameters();
      j["optimizer"] = adam_json(a.optimizer());
      j["rng"] = a.rng().serialize();
      j["rollout"] = rollout_json();
    } else {
      const auto& a = *dqn_;
      j["shapes"] = {{"q", a.online().shapes()}};
      j["parameters"] = a.parameters();
      j["target_parameters"] = a.target_parameters();
      j["optimizer"] = adam_json(a.optimizer());
      j["rng"] = a.rng().serialize();
      j["beta"] = a.beta();
      j["gradient_steps"] = a.gradient_steps();
      j["total_steps"] = total_steps_;
      json items = json::array();
      for (const auto& it : a.buffer().items()) {
        items.push_back({it.observation, it.action, it.reward, it.next_observation, it.done});
      }
      j["replay"] = {{"items", items},
                     {"priorities", a.buffer().stored_priorities()},
                     {"next", a.buffer().next_index()},
                     {"max_priority", a.buffer().max_priority()}};
    }
    return j;
  }

  void restore(const json& j) {
    if (j.value("format", "") != "epirl-checkpoint") throw ParseError("not a checkpoint file");
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw ParseError("unsupported checkpoint version " + j.at("version").dump());
    }
    if (j.at("agent").get<std::string>() != to_string(kind_)) {
      throw ConfigError("checkpoint holds a " + j.at("agent").get<std::string>() + " agent");
    }
    curve_ = j.at("curve").get<std::vector<double>>();
    const auto params = j.at("parameters").get<std::vector<double>>();
    if (kind_ == AgentKind::kPpo) {
      ppo_->set_parameters(params);
      restore_adam(ppo_->optimizer(), j.at("optimizer"));
      ppo_->rng().deserialize(j.at("rng").get<std::string>());
      restore_rollout(j.at("rollout"));
    } else {
      dqn_->set_parameters(params, j.at("target_parameters").get<std::vector<double>>());
      restore_adam(dqn_->optimizer(), j.at("optimizer"));
      dqn_->rng().deserialize(j.at("rng").get<std::string>());
      dqn_->restore_counters(j.at("beta").get<double>(), j.at("gradient_steps").get<std::int64_t>());
      total_steps_ = j.at("total_steps").get<std::int64_t>();
      std::vector<ReplayItem> items;
      for (const auto& it : j.at("replay").at("items")) {
        items.push_back({it.at(0).get<std::vector<double>>(), it.at(1).get<std::size_t>(),
                         it.at(2).get<double>(), it.at(3).get<std::vector<double>>(),
                         it.at(4).get<bool>()});
      }
      const auto& r = j.at("replay");
      dqn_->buffer().restore(std::move(items), r.at("priorities").get<std::vector<double>>(),
                             r.at("next").get<std::size_t>(), r.at("max_priority").get<double>());
    }
  }

  void save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw Error("cannot write checkpoint " + path.string());
    os << checkpoint().dump() << '\n';
  }

 private:
  static std::uint64_t episode_seed(std::uint64_t seed, std::int64_t episode) {
    return derive_seed(derive_seed(seed, "episode"), static_cast<std::uint64_t>(episode));
  }

  double ppo_episode(std::int64_t ep) {
    auto& a = *ppo_;
    const double scale = cfg_.ppo.reward_scale;
    auto obs = env_->reset(episode_seed(seed_, ep));
    double ret = 0.0;
    for (bool done = false; !done;) {
      const PolicySample s = a.sample(obs);
      const Transition t = env_->step(s.action);
      ret += t.reward;
      rollout_.batch.observations.push_back(obs);
      rollout_.batch.raw_actions.push_back(s.raw);
      rollout_.batch.old_log_probs.push_back(s.log_prob);
      rollout_.values.push_back(s.value);
      rollout_.rewards.push_back(t.reward * scale);
      rollout_.dones.push_back(t.done);
      obs = t.observation;
      done = t.done;
      if (static_cast<std::int64_t>(rollout_.size()) >= cfg_.ppo.n_steps) {
        const double last_value = done ? 0.0 : a.value(obs);
        const std::vector<bool>& dv = rollout_.dones;
        const std::unique_ptr<bool[]> dones(new bool[dv.size()]);
        for (std::size_t i = 0; i < dv.size(); ++i) dones[i] = dv[i];
        const GaeResult g = compute_gae(rollout_.rewards, rollout_.values,
                                        std::span<const bool>(dones.get(), dv.size()), last_value,
                                        cfg_.ppo.gamma, cfg_.ppo.gae_lambda);
        rollout_.batch.advantages = g.advantages;
        rollout_.batch.returns = g.returns;
        a.update(rollout_.batch);
        if (!a.parameters_finite()) throw TrainingError("ppo: parameters became non-finite");
        rollout_.clear();
      }
    }
    return ret;
  }

  double dqn_episode(std::int64_t ep, std::int64_t total_episodes) {
    auto& a = *dqn_;
    const double scale = cfg_.dqn.reward_scale;
    const double progress =
        total_episodes > 0 ? static_cast<double>(ep) / static_cast<double>(total_episodes) : 1.0;
    const double eps = a.epsilon(progress);
    auto obs = env_->reset(episode_seed(seed_, ep));
    double ret = 0.0;
    for (bool done = false; !done;) {
      const std::size_t action = a.act(obs, eps);
      const Transition t = env_->step(AgentAction{action});
      ret += t.reward;
      a.remember({obs, action, t.reward * scale, t.observation, t.done});
      ++total_steps_;
      if (a.ready() && total_steps_ % std::max<std::int64_t>(1, cfg_.dqn.train_freq) == 0) {
        a.update();
        if (!a.parameters_finite()) throw TrainingError("dqn: parameters became non-finite");
      }
      obs = t.observation;
      done = t.done;
    }
    return ret;
  }

  static json adam_json(const nn::Adam& o) {
    return {{"t", o.steps()}, {"m", o.first_moment()}, {"v", o.second_moment()}};
  }

  static void restore_adam(nn::Adam& o, const json& j) {
    o.restore(j.at("t").get<std::int64_t>(), j.at("m").get<std::vector<double>>(),
              j.at("v").get<std::vector<double>>());
  }

  json rollout_json() const {
    return {{"observations", rollout_.batch.observations},
            {"raw_actions", rollout_.batch.raw_actions},
            {"log_probs", rollout_.batch.old_log_probs},
            {"values", rollout_.values},
            {"rewards", rollout_.rewards},
            {"dones", rollout_.dones}};
  }

  void restore_rollout(const json& j) {
    rollout_.clear();
    rollout_.batch.observations = j.at("observations").get<std::vector<std::vector<double>>>();
    rollout_.batch.raw_actions = j.at("raw_actions").get<std::vector<std::vector<double>>>();
    rollout_.batch.old_log_probs = j.at("log_probs").get<std::vector<double>>();
    rollout_.values = j.at("values").get<std::vector<double>>();
    rollout_.rewards = j.at("rewards").get<std::vector<double>>();
    rollout_.dones = j.at("dones").get<std::vector<bool>>();
  }

  EnvFactory factory_;
  AgentKind kind_;
  Config cfg_;
  std::uint64_t seed_;
  std::unique_ptr<RlEnv> env_;
  std::optional<PpoAgent> ppo_;
  std::optional<DqnAgent> dqn_;
  Rollout rollout_;
  std::int64_t total_steps_ = 0;
  std::vector<double> curve_;
};

// Trains from scratch, or from opt.resume, up to opt.total_episodes.
inline Trainer train(const EnvFactory& factory, AgentKind kind, const Config& cfg,
                     const TrainOptions& opt) {
  Trainer t(factory, kind, cfg, opt.seed);
  if (opt.resume) t.restore(*opt.resume);
  t.run(opt);
  return t;
}

inline json read_checkpoint(const std::string& path) {
  const json j = read_json_file(path);
  if (!j.is_object() || j.value("format", "") != "epirl-checkpoint") {
    throw ParseError(path + ": not a checkpoint file");
  }
  return j;
}

// Rebuilds the agent stored in a checkpoint, ready for greedy evaluation.
inline Trainer load_trainer(const json& ckpt, const EnvFactory& factory) {
  const Config cfg = config_from_json(ckpt.at("config"));
  Trainer t(factory, parse_agent_kind(ckpt.at("agent").get<std::string>()), cfg,
            ckpt.at("seed").get<std::uint64_t>());
  t.restore(ckpt);
  return t;
}

inline void write_curve_csv(std::ostream& os, const std::vector<double>& curve) {
  os << std::setprecision(12) << "episode,return\n";
  for (std::size_t i = 0; i < curve.size(); ++i) os << i << ',' << curve[i] << '\n';
}

// A policy for evaluation drives one environment step from the current
// observation.
struct EvalPolicy {
  std::string name;
  std::function<StepResult(EpidemicEnv&, const Observation&)> step;
};

inline EvalPolicy schedule_eval_policy(std::string name, SchedulePolicy schedule) {
  return {std::move(name), [schedule = std::move(schedule)](EpidemicEnv& env, const Observation&) {
            return env.step(schedule);
          }};
}

inline EvalPolicy agent_eval_policy(std::string name,
                                    std::function<AgentAction(const std::vector<double>&)> act) {
  return {std::move(name), [act = std::move(act)](EpidemicEnv& env, const Observation& obs) {
            const auto f = obs.features(env.config().env, env.population());
            return env.step(EpidemicRlEnv::to_action(act(f)));
          }};
}

// Writes one JSON line per step to `trace` when given.
inline EpisodeMetrics run_episode(const EvalPolicy& policy, const Config& cfg, std::uint64_t seed,
                                  std::ostream* trace = nullptr) {
  EpidemicEnv env(cfg);
  Observation obs = env.reset(seed);
  EpisodeMetrics m;
  m.seed = seed;
  while (!env.done()) {
    const StepResult r = policy.step(env, obs);
    m.total_return += r.reward;
    m.actions.push_back(r.info.applied_action);
    m.daily_actions.insert(m.daily_actions.end(), r.info.daily_actions.begin(), r.info.daily_actions.end());
    if (trace) write_trace_line(*trace, r);
    for (const auto& d : r.info.daily_rewards) m.daily_loss.push_back(d.loss);
    obs = r.observation;
  }
  m.series = env.history();
  if (!m.series.empty()) {
    m.cumulative_infections = static_cast<double>(m.series.back().cumulative_infections);
    m.deaths = static_cast<double>(m.series.back().cumulative_dead);
  }
  m.economic_loss_pct = aggregate_economic_loss(m.daily_loss);
  m.rt = estimate_rt(m.series, cfg.disease.infectious_duration.expected());
  m.rt_cross_day = rt_crossing_day(m.rt);
  return m;
}

// One episode per seed, deterministic actions.
inline StrategyMetrics evaluate(const EvalPolicy& policy, const Config& cfg,
                                const std::vector<std::uint64_t>& seeds) {
  StrategyMetrics s;
  s.name = policy.name;
  for (auto seed : seeds) s.episodes.push_back(run_episode(policy, cfg, seed));
  return s;
}

}  // namespace epirl
