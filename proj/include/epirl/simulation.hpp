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

#include <algorithm>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "epirl/action.hpp"
#include "epirl/config.hpp"
#include "epirl/interventions.hpp"
#include "epirl/population.hpp"
#include "epirl/sim_state.hpp"
#include "epirl/types.hpp"

namespace epirl {

// Transmission-probability multiplier for an infectious source, before the
// target's susceptibility.
inline double source_factor(const Agent& src, Day day, const PopulationConfig& pop,
                            const InterventionConfig& iv) {
  double f = src.epi_state == EpiState::kInfectiousAsymptomatic ? pop.asymp_factor : 1.0;
  if (src.diagnosed) {
    f *= iv.isolation_transmission_factor;
  } else if (src.quarantined_on(day)) {
    f *= iv.quarantine_transmission_factor;
  }
  return f;
}

// Stocks of the current state with all flows zero, stamped with `day`.
inline DailyCounts count_stocks(const SimState& state, Day day) {
  DailyCounts c;
  c.day = day;
  for (const Agent& a : state.agents()) {
    switch (a.epi_state) {
      case EpiState::kSusceptible: ++c.S; break;
      case EpiState::kExposed: ++c.E; break;
      case EpiState::kInfectiousAsymptomatic:
      case EpiState::kInfectiousMild:
      case EpiState::kInfectiousSevere: ++c.I; break;
      case EpiState::kRecovered: ++c.R; break;
      case EpiState::kDead: ++c.D; break;
    }
    if (a.quarantined_on(day)) ++c.currently_quarantined;
  }
  c.currently_infected = c.E + c.I;
  c.cumulative_dead = c.D;
  c.cumulative_tests = state.cumulative_tests;
  c.cumulative_quarantined = state.cumulative_quarantined;
  c.cumulative_diagnoses = state.cumulative_diagnoses;
  c.cumulative_infections = state.cumulative_infections;
  return c;
}

// Day-resolution agent-based SEIRD simulation over household, school, work
// and community layers. Single-threaded; independent instances share nothing.
class Simulation {
 public:
  Simulation(SimulationConfig config, std::uint64_t seed) {
    validate(config.population);
    validate(config.disease);
    validate(config.interventions);
    const Rng master(seed);
    state_.config = std::move(config);
    state_.population = synthesize_population(state_.config.population, seed);
    state_.transmission_rng = master.substream("transmission");
    state_.community_rng = master.substream("community");
    state_.progression_rng = master.substream("progression");
    state_.testing_rng = master.substream("testing");
    state_.tracing_rng = master.substream("tracing");
    Rng seeding = master.substream("seeding");
    const auto seeded = seed_infections(state_.population, state_.config.population,
                                        state_.config.disease, seeding);
    state_.cumulative_infections = static_cast<std::int64_t>(seeded.size());
    state_.susceptibility.reserve(state_.agents().size());
    for (const Agent& a : state_.agents()) {
      state_.susceptibility.push_back(lookup(state_.config.population.sus_odds_ratios, a.age));
    }
  }

  // Wraps a hand-built state (tests and small crafted scenarios).
  explicit Simulation(SimState state) : state_(std::move(state)) {}

  Day day() const { return state_.day; }
  const SimState& state() const { return state_; }
  SimState& mutable_state() { return state_; }
  const std::vector<Agent>& agents() const { return state_.agents(); }

  // Stocks at the start of the next day to be simulated.
  DailyCounts snapshot() const { return count_stocks(state_, state_.day); }

  // Simulates one day under `action`: community resampling, transmission,
  // disease progression, testing, tracing, then the day's counts.
  DailyCounts step_day(const Action& action) {
    validate_simulator_action(action);
    const Day today = state_.day;
    const std::int64_t infections_before = state_.cumulative_infections;

    state_.previous_community = std::move(state_.community);
    state_.community = sample_community_layer(state_.agents().size(),
                                              state_.config.population.contacts.c,
                                              state_.community_rng);

    transmit(effective_beta(state_.config.population.beta_initial, action.ch_beta));

    DailyCounts flows;
    progress(flows);

    const TestingOutcome tests = run_testing(state_, action.ch_tp);
    const std::int64_t quarantined = run_tracing(state_, action.ch_ctp);

    DailyCounts out = count_stocks(state_, today);
    out.new_infections = state_.cumulative_infections - infections_before;
    out.new_severe = flows.new_severe;
    out.new_deaths = flows.new_deaths;
    out.new_recovered = flows.new_recovered;
    out.new_tests = tests.new_tests;
    out.new_diagnoses = tests.new_diagnoses;
    out.new_quarantined = quarantined;
    ++state_.day;
    return out;
  }

 private:
  void transmit(double beta) {
    const auto& pop_cfg = state_.config.population;
    const auto& iv_cfg = state_.config.interventions;
    auto& agents = state_.agents();
    const Day today = state_.day;
    const std::pair<const ContactLayer*, double> layers[] = {
        {&state_.population.household, pop_cfg.layer_weights.h},
        {&state_.population.school, pop_cfg.layer_weights.s},
        {&state_.population.work, pop_cfg.layer_weights.w},
        {&state_.community, pop_cfg.layer_weights.c},
    };
    for (std::size_t id = 0; id < agents.size(); ++id) {
      const Agent& src = agents[id];
      if (!is_infectious(src.epi_state)) continue;
      const double src_p = beta * source_factor(src, today, pop_cfg, iv_cfg);
      for (const auto& [layer, weight] : layers) {
        for (AgentId tid : layer->neighbors(static_cast<AgentId>(id))) {
          Agent& tgt = agents[tid];
          if (tgt.epi_state != EpiState::kSusceptible) continue;
          double p = src_p * weight * state_.susceptibility[tid];
          if (tgt.quarantined_on(today)) p *= iv_cfg.quarantine_susceptibility_factor;
          p = std::clamp(p, 0.0, 1.0);
          if (state_.transmission_rng.uniform() < p) infect(tgt);
        }
      }
    }
  }

  void infect(Agent& a) {
    a.epi_state = EpiState::kExposed;
    a.state_entry_day = state_.day;
    a.scheduled_transition_day =
        state_.day + state_.config.disease.latent_duration.sample(state_.progression_rng);
    ++state_.cumulative_infections;
  }

  void progress(DailyCounts& flows) {
    const auto& disease = state_.config.disease;
    Rng& rng = state_.progression_rng;
    const Day today = state_.day;
    for (Agent& a : state_.agents()) {
      if (!a.scheduled_transition_day || *a.scheduled_transition_day != today) continue;
      a.state_entry_day = today;
      switch (a.epi_state) {
        case EpiState::kExposed: {
          if (!rng.bernoulli(lookup(disease.prob_symptomatic, a.age, 0.0))) {
            a.epi_state = EpiState::kInfectiousAsymptomatic;
            a.scheduled_transition_day = today + disease.infectious_duration.sample(rng);
          } else if (rng.bernoulli(lookup(disease.prob_severe_given_symptomatic, a.age, 0.0))) {
            a.epi_state = EpiState::kInfectiousMild;
            a.severe_onset_day = today + disease.severe_onset_delay.sample(rng);
            a.scheduled_transition_day = a.severe_onset_day;
          } else {
            a.epi_state = EpiState::kInfectiousMild;
            a.scheduled_transition_day = today + disease.infectious_duration.sample(rng);
          }
          break;
        }
        case EpiState::kInfectiousMild:
          if (a.severe_onset_day && *a.severe_onset_day == today) {
            a.epi_state = EpiState::kInfectiousSevere;
            a.severe_onset_day.reset();
            a.will_die = rng.bernoulli(lookup(disease.prob_death_given_severe, a.age, 0.0));
            a.scheduled_transition_day = today + disease.severe_duration.sample(rng);
            ++flows.new_severe;
          } else {
            recover(a, flows);
          }
          break;
        case EpiState::kInfectiousAsymptomatic:
          recover(a, flows);
          break;
        case EpiState::kInfectiousSevere:
          if (a.will_die) {
            a.epi_state = EpiState::kDead;
            a.scheduled_transition_day.reset();
            ++flows.new_deaths;
          } else {
            recover(a, flows);
          }
          break;
        case EpiState::kSusceptible:
        case EpiState::kRecovered:
        case EpiState::kDead:
          a.scheduled_transition_day.reset();
          break;
      }
    }
  }

  static void recover(Agent& a, DailyCounts& flows) {
    a.epi_state = EpiState::kRecovered;
    a.scheduled_transition_day.reset();
    ++flows.new_recovered;
  }

  SimState state_;
};

// Chooses the action for `day` given the latest counts (the day-0 snapshot
// before the first day).
using DayPolicy = std::function<Action(Day day, const DailyCounts& latest)>;

// Runs n_days days. The policy is consulted every `decision_interval` days
// and its action held in between; an empty policy means no intervention.
inline std::vector<DailyCounts> run_simulation(const SimulationConfig& config, std::uint64_t seed,
                                               std::int64_t n_days, const DayPolicy& policy = {},
                                               std::int32_t decision_interval = 1) {
  if (n_days < 0) throw ConfigError("n_days must be >= 0");
  if (decision_interval < 1) throw ConfigError("decision_interval must be >= 1");
  Simulation sim(config, seed);
  std::vector<DailyCounts> series;
  series.reserve(static_cast<std::size_t>(n_days));
  DailyCounts latest = sim.snapshot();
  Action action = kNullAction;
  for (std::int64_t d = 0; d < n_days; ++d) {
    const Day day = static_cast<Day>(d);
    if (policy && day % decision_interval == 0) {
      action = policy(day, latest);
      validate_simulator_action(action);
    }
    latest = sim.step_day(action);
    series.push_back(latest);
  }
  return series;
}

}  // namespace epirl
