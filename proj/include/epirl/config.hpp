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

// Configuration sections and their JSON representation.
//
// Every section has complete defaults; a config file is a (possibly partial)
// JSON object overlaid on them. Unknown keys are rejected so that typos do
// not silently fall back to defaults.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "epirl/action.hpp"
#include "epirl/errors.hpp"
#include "epirl/random.hpp"

namespace epirl {

using json = nlohmann::json;

// Piecewise-constant function of age over [lo, hi) bands.
struct AgeBand {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
  bool operator==(const AgeBand&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AgeBand, lo, hi, value)

using AgeTable = std::vector<AgeBand>;

// Value of the first band containing `age`, or `fallback` when none does.
inline double lookup(const AgeTable& table, double age, double fallback = 1.0) {
  for (const auto& band : table) {
    if (age >= band.lo && age < band.hi) return band.value;
  }
  return fallback;
}

inline AgeTable decade_table(const std::vector<double>& values) {
  AgeTable t;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double lo = 10.0 * static_cast<double>(i);
    const double hi = i + 1 == values.size() ? 200.0 : lo + 10.0;
    t.push_back({lo, hi, values[i]});
  }
  return t;
}

struct LayerValues {
  double h = 0.0;
  double s = 0.0;
  double w = 0.0;
  double c = 0.0;
  bool operator==(const LayerValues&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LayerValues, h, s, w, c)

struct PopulationConfig {
  double total_pop = 67.86e6;
  std::int64_t pop_size = 10000;
  double pop_infected = 5856;
  LayerValues contacts{3.0, 20.0, 20.0, 20.0};
  LayerValues layer_weights{1.0, 1.0, 1.0, 1.0};
  double beta_initial = 0.005997;
  double asymp_factor = 2.0;
  AgeTable sus_odds_ratios{{0, 10, 1.0}, {10, 20, 1.0}, {20, 200, 1.0}};
  // Relative weights of 10-year bands; the last band is open-ended.
  AgeTable age_pyramid = decade_table({0.12, 0.11, 0.13, 0.13, 0.13, 0.14, 0.11, 0.08, 0.04, 0.01});
  double school_age_min = 6.0;
  double school_age_max = 22.0;
  double work_age_min = 22.0;
  double work_age_max = 65.0;
  std::int64_t school_size = 200;
  std::int64_t workplace_size = 50;

  double pop_scale() const { return total_pop / static_cast<double>(pop_size); }

  bool operator==(const PopulationConfig&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PopulationConfig, total_pop, pop_size,
                                                pop_infected, contacts, layer_weights,
                                                beta_initial, asymp_factor, sus_odds_ratios,
                                                age_pyramid, school_age_min, school_age_max,
                                                work_age_min, work_age_max, school_size,
                                                workplace_size)

// Duration in whole days, at least one.
struct DurationDist {
  std::string dist = "lognormal";  // lognormal | uniform | fixed
  double mean = 1.0;
  double sd = 0.0;
  double min = 1.0;
  double max = 1.0;

  std::int32_t sample(Rng& rng) const {
    double days = mean;
    if (dist == "lognormal") {
      days = sd > 0.0 ? rng.lognormal_mean_sd(mean, sd) : mean;
    } else if (dist == "uniform") {
      days = static_cast<double>(
          rng.integer(static_cast<std::int64_t>(min), static_cast<std::int64_t>(max)));
    }
    const auto d = static_cast<std::int32_t>(std::llround(days));
    return d < 1 ? 1 : d;
  }

  double expected() const { return dist == "uniform" ? 0.5 * (min + max) : mean; }

  bool operator==(const DurationDist&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DurationDist, dist, mean, sd, min, max)

struct DiseaseConfig {
  DurationDist latent_duration{"lognormal", 4.5, 1.5, 1, 1};
  DurationDist infectious_duration{"lognormal", 8.0, 2.0, 1, 1};
  DurationDist severe_onset_delay{"uniform", 6.5, 0.0, 5, 8};
  // Severe onset to recovery or death.
  DurationDist severe_duration{"lognormal", 10.0, 3.0, 1, 1};
  AgeTable prob_symptomatic =
      decade_table({0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.90});
  AgeTable prob_severe_given_symptomatic =
      decade_table({0.001, 0.003, 0.012, 0.032, 0.049, 0.102, 0.166, 0.243, 0.273, 0.273});
  AgeTable prob_death_given_severe =
      decade_table({0.040, 0.012, 0.014, 0.015, 0.029, 0.035, 0.058, 0.118, 0.337, 0.659});

  double mean_infectious_duration() const { return infectious_duration.expected(); }

  bool operator==(const DiseaseConfig&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DiseaseConfig, latent_duration,
                                                infectious_duration, severe_onset_delay,
                                                severe_duration, prob_symptomatic,
                                                prob_severe_given_symptomatic,
                                                prob_death_given_severe)

struct InterventionConfig {
  std::int32_t test_delay = 1;
  double asymptomatic_test_factor = 0.01;
  double isolation_transmission_factor = 0.3;
  std::int32_t quarantine_duration = 14;
  double quarantine_transmission_factor = 0.3;
  double quarantine_susceptibility_factor = 0.3;
  std::int32_t trace_delay = 2;
  // Trace the previous day's community contacts as well as h/s/w.
  bool trace_community = true;

  bool operator==(const InterventionConfig&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(InterventionConfig, test_delay,
                                                asymptomatic_test_factor,
                                                isolation_transmission_factor,
                                                quarantine_duration,
                                                quarantine_transmission_factor,
                                                quarantine_susceptibility_factor, trace_delay,
                                                trace_community)

struct EnvConfig {
  std::int32_t step_days = 7;
  std::int32_t episode_days = 133;
  // Cumulative infections (agents, seeded included) before actions take effect.
  double activation_threshold = 50;
  std::string action_space_kind = "continuous";
  bool observation_normalization = true;
  // Eighth observation component (cumulative diagnoses).
  bool observe_diagnoses = true;

  ActionSpaceKind kind() const { return parse_action_space_kind(action_space_kind); }
  std::int32_t steps_per_episode() const { return (episode_days + step_days - 1) / step_days; }

  bool operator==(const EnvConfig&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EnvConfig, step_days, episode_days,
                                                activation_threshold, action_space_kind,
                                                observation_normalization, observe_diagnoses)

struct RewardWeights {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  double omega1 = 1.0;
  double omega2 = 5.0;
  double omega3 = 100.0;
  double mu1 = 1.0;
  double mu2 = 0.5;
  double mu3 = 0.5;
  double mu4 = 1.0;
  double economic_scale = 100.0;
  double cost_per_test = 1.0;
  double quarantine_processing_cost = 1.0;

  bool operator==(const RewardWeights&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RewardWeights, lambda1, lambda2, lambda3,
                                                omega1, omega2, omega3, mu1, mu2, mu3, mu4,
                                                economic_scale, cost_per_test,
                                                quarantine_processing_cost)

struct PpoConfig {
  std::int64_t n_steps = 190;
  std::int64_t batch_size = 19;
  double learning_rate = 1e-4;
  std::int64_t n_epochs = 10;
  double gamma = 0.99;
  double clip_range = 0.2;
  double gae_lambda = 0.95;
  double entropy_coef = 0.0;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  double reward_scale = 1e-3;
  double init_log_std = 0.0;
  double adam_eps = 1e-5;
  std::vector<std::int64_t> hidden{64, 64};

  bool operator==(const PpoConfig&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PpoConfig, n_steps, batch_size, learning_rate,
                                                n_epochs, gamma, clip_range, gae_lambda,
                                                entropy_coef, value_coef, max_grad_norm,
                                                reward_scale, init_log_std, adam_eps, hidden)

struct DqnConfig {
  std::int64_t buffer_size = 1900;
  std::int64_t batch_size = 19;
  std::int64_t learning_starts = 57;
  double learning_rate = 1e-4;
  std::int64_t target_update_interval = 95;
  double tau = 1.0;
  double gamma = 0.99;
  double per_alpha = 0.6;
  double per_beta = 0.4;
  double per_beta_increment = 0.001;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_fraction = 0.5;
  std::int64_t train_freq = 1;
  double priority_floor = 1e-3;
  double reward_scale = 1e-3;
  double max_grad_norm = 10.0;
  double adam_eps = 1e-8;
  std::vector<std::int64_t> hidden{64, 64};

  bool operator==(const DqnConfig&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DqnConfig, buffer_size, batch_size,
                                                learning_starts, learning_rate,
                                                target_update_interval, tau, gamma, per_alpha,
                                                per_beta, per_beta_increment, epsilon_start,
                                                epsilon_end, epsilon_fraction, train_freq,
                                                priority_floor, reward_scale, max_grad_norm,
                                                adam_eps, hidden)

struct TrainingConfig {
  std::int64_t checkpoint_interval = 100;  // episodes; 0 disables periodic checkpoints

  bool operator==(const TrainingConfig&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainingConfig, checkpoint_interval)

struct CalibrationConfig {
  std::string start_date = "2020-01-21";
  double pop_infected_min = 1000;
  double pop_infected_max = 50000;
  double beta_min = 0.003;
  double beta_max = 0.012;
  std::int64_t trials = 100;
  std::int64_t replications = 3;
  double case_weight = 1.0;
  double death_weight = 1.0;
  double global_fraction = 0.7;
  // Local perturbation sd as a fraction of each range's width.
  double local_scale = 0.1;
  std::string schedule = "uk-approx";

  bool operator==(const CalibrationConfig&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CalibrationConfig, start_date,
                                                pop_infected_min, pop_infected_max, beta_min,
                                                beta_max, trials, replications, case_weight,
                                                death_weight, global_fraction, local_scale,
                                                schedule)

struct Config {
  std::int64_t n_days = 133;
  PopulationConfig population;
  DiseaseConfig disease;
  InterventionConfig interventions;
  EnvConfig env;
  RewardWeights rewards;
  PpoConfig ppo;
  DqnConfig dqn;
  TrainingConfig training;
  CalibrationConfig calibration;

  bool operator==(const Config&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Config, n_days, population, disease,
                                                interventions, env, rewards, ppo, dqn,
                                                training, calibration)

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

inline bool finite(double v) { return std::isfinite(v); }

inline void require_probability_table(const AgeTable& t, const std::string& name) {
  for (const auto& b : t) {
    require(b.lo < b.hi, name + ": empty age band");
    require(b.value >= 0.0 && b.value <= 1.0, name + ": probability outside [0, 1]");
  }
}

inline void require_duration(const DurationDist& d, const std::string& name) {
  require(d.dist == "lognormal" || d.dist == "uniform" || d.dist == "fixed",
          name + ": unknown distribution '" + d.dist + "'");
  if (d.dist == "uniform") {
    require(d.min >= 1.0 && d.max >= d.min, name + ": uniform bounds must satisfy 1 <= min <= max");
  } else {
    require(d.mean > 0.0 && d.sd >= 0.0, name + ": mean must be > 0 and sd >= 0");
  }
}

}  // namespace detail

inline void validate(const PopulationConfig& c) {
  using detail::require;
  require(c.pop_size >= 2, "population.pop_size must be >= 2");
  require(c.total_pop > 0.0 && detail::finite(c.total_pop), "population.total_pop must be > 0");
  require(c.pop_infected >= 0.0, "population.pop_infected must be >= 0");
  require(c.beta_initial >= 0.0 && c.beta_initial < 1.0,
          "population.beta_initial must lie in [0, 1)");
  require(c.contacts.h > 0 && c.contacts.s > 0 && c.contacts.w > 0 && c.contacts.c > 0,
          "population.contacts must all be > 0");
  require(c.layer_weights.h >= 0 && c.layer_weights.s >= 0 && c.layer_weights.w >= 0 &&
              c.layer_weights.c >= 0,
          "population.layer_weights must be >= 0");
  require(c.asymp_factor >= 0.0, "population.asymp_factor must be >= 0");
  for (const auto& b : c.sus_odds_ratios) {
    require(b.lo < b.hi && b.value >= 0.0, "population.sus_odds_ratios: invalid band");
  }
  double pyramid = 0.0;
  for (const auto& b : c.age_pyramid) {
    require(b.lo < b.hi && b.value >= 0.0, "population.age_pyramid: invalid band");
    pyramid += b.value;
  }
  require(pyramid > 0.0, "population.age_pyramid must have positive total weight");
  require(c.school_size >= 1 && c.workplace_size >= 1, "school/workplace sizes must be >= 1");
}

inline void validate(const DiseaseConfig& c) {
  detail::require_duration(c.latent_duration, "disease.latent_duration");
  detail::require_duration(c.infectious_duration, "disease.infectious_duration");
  detail::require_duration(c.severe_onset_delay, "disease.severe_onset_delay");
  detail::require_duration(c.severe_duration, "disease.severe_duration");
  detail::require_probability_table(c.prob_symptomatic, "disease.prob_symptomatic");
  detail::require_probability_table(c.prob_severe_given_symptomatic,
                                    "disease.prob_severe_given_symptomatic");
  detail::require_probability_table(c.prob_death_given_severe, "disease.prob_death_given_severe");
}

inline void validate(const InterventionConfig& c) {
  using detail::require;
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  require(c.test_delay >= 0 && c.trace_delay >= 0, "interventions: delays must be >= 0");
  require(c.quarantine_duration >= 0, "interventions.quarantine_duration must be >= 0");
  require(unit(c.asymptomatic_test_factor) && unit(c.isolation_transmission_factor) &&
              unit(c.quarantine_transmission_factor) &&
              unit(c.quarantine_susceptibility_factor),
          "interventions: factors must lie in [0, 1]");
}

inline void validate(const EnvConfig& c) {
  detail::require(c.step_days >= 1, "env.step_days must be >= 1");
  detail::require(c.episode_days >= 1, "env.episode_days must be >= 1");
  detail::require(c.activation_threshold >= 0, "env.activation_threshold must be >= 0");
  (void)c.kind();
}

inline void validate(const RewardWeights& w) {
  for (double v : {w.lambda1, w.lambda2, w.lambda3, w.omega1, w.omega2, w.omega3, w.mu1, w.mu2,
                   w.mu3, w.mu4, w.economic_scale, w.cost_per_test,
                   w.quarantine_processing_cost}) {
    detail::require(detail::finite(v), "rewards: weights must be finite");
  }
  detail::require(w.mu1 > 0.0, "rewards.mu1 must be > 0");
}

inline void validate(const PpoConfig& c) {
  using detail::require;
  require(c.n_steps >= 1 && c.batch_size >= 1, "ppo: n_steps and batch_size must be >= 1");
  require(c.n_steps % c.batch_size == 0, "ppo.n_steps must be divisible by ppo.batch_size");
  require(c.clip_range > 0.0, "ppo.clip_range must be > 0");
  require(c.gamma > 0.0 && c.gamma <= 1.0, "ppo.gamma must lie in (0, 1]");
  require(c.gae_lambda >= 0.0 && c.gae_lambda <= 1.0, "ppo.gae_lambda must lie in [0, 1]");
  require(c.learning_rate > 0.0 && c.n_epochs >= 1, "ppo: learning_rate > 0, n_epochs >= 1");
  require(!c.hidden.empty(), "ppo.hidden must list at least one layer");
}

inline void validate(const DqnConfig& c) {
  using detail::require;
  require(c.buffer_size >= 1 && c.batch_size >= 1, "dqn: buffer_size and batch_size >= 1");
  require(c.learning_starts <= c.buffer_size, "dqn.learning_starts must be <= buffer_size");
  require(c.learning_starts >= c.batch_size, "dqn.learning_starts must be >= batch_size");
  require(c.tau > 0.0 && c.tau <= 1.0, "dqn.tau must lie in (0, 1]");
  require(c.per_alpha >= 0.0, "dqn.per_alpha must be >= 0");
  require(c.per_beta >= 0.0 && c.per_beta <= 1.0, "dqn.per_beta must lie in [0, 1]");
  require(c.gamma > 0.0 && c.gamma <= 1.0, "dqn.gamma must lie in (0, 1]");
  require(c.target_update_interval >= 1 && c.train_freq >= 1,
          "dqn: target_update_interval and train_freq must be >= 1");
  require(c.priority_floor > 0.0, "dqn.priority_floor must be > 0");
  require(!c.hidden.empty(), "dqn.hidden must list at least one layer");
}

inline void validate(const CalibrationConfig& c) {
  using detail::require;
  require(c.pop_infected_min >= 0 && c.pop_infected_min <= c.pop_infected_max,
          "calibration: pop_infected range is empty");
  require(c.beta_min >= 0 && c.beta_min <= c.beta_max && c.beta_max < 1.0,
          "calibration: beta range is empty");
  require(c.trials >= 1, "calibration.trials must be >= 1");
  require(c.replications >= 1, "calibration.replications must be >= 1");
  require(c.global_fraction >= 0.0 && c.global_fraction <= 1.0,
          "calibration.global_fraction must lie in [0, 1]");
}

inline void validate(const Config& c) {
  detail::require(c.n_days >= 1, "n_days must be >= 1");
  validate(c.population);
  validate(c.disease);
  validate(c.interventions);
  validate(c.env);
  validate(c.rewards);
  validate(c.ppo);
  validate(c.dqn);
  validate(c.calibration);
}

// ---------------------------------------------------------------------------
// Loading

namespace detail {

inline void check_known_keys(const json& given, const json& reference, const std::string& path) {
  if (!given.is_object() || !reference.is_object()) return;
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!reference.contains(it.key())) throw ConfigError("unknown key '" + key + "'");
    check_known_keys(it.value(), reference.at(it.key()), key);
  }
}

inline json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

}  // namespace detail

// Applies `key.path=value` to a JSON config; the path must already exist.
inline void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string path = assignment.substr(0, eq);
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!node->is_object() || !node->contains(key)) {
      throw ConfigError("override targets unknown key '" + path + "'");
    }
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = detail::parse_override_value(assignment.substr(eq + 1));
}

inline Config config_from_json(const json& overlay, const std::vector<std::string>& overrides = {}) {
  json doc = Config{};
  detail::check_known_keys(overlay, doc, "");
  doc.merge_patch(overlay);
  for (const auto& o : overrides) apply_override(doc, o);
  Config c;
  try {
    c = doc.get<Config>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed value: ") + e.what());
  }
  validate(c);
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline Config load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  return config_from_json(path.empty() ? json::object() : read_json_file(path), overrides);
}

}  // namespace epirl
