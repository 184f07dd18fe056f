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

// Lockdown, testing and contact tracing. These run inside a simulation day;
// they can also be driven directly on a hand-built SimState.

#include <algorithm>
#include <cstdint>
#include <string>

#include "epirl/action.hpp"
#include "epirl/sim_state.hpp"

namespace epirl {

namespace detail {

inline void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ActionDomainError(std::string(name) + "=" + std::to_string(v) + " outside [0, 1]");
  }
}

}  // namespace detail

// Multiplier applied to beta_initial on every layer.
inline double apply_lockdown(double ch_beta) {
  detail::require_unit(ch_beta, "ch_beta");
  return ch_beta;
}

inline double effective_beta(double beta_initial, double ch_beta) {
  return beta_initial * apply_lockdown(ch_beta);
}

struct TestingOutcome {
  std::int64_t new_tests = 0;
  std::int64_t new_diagnoses = 0;
};

// Administers today's tests, then returns every result due today. Symptomatic
// agents are tested with probability ch_tp, everyone else with
// ch_tp * asymptomatic_test_factor. Tests are perfect: exposed and infectious
// agents test positive. Positive results mark the agent diagnosed (isolated)
// and append it to state.diagnosed_today.
inline TestingOutcome run_testing(SimState& state, double ch_tp) {
  detail::require_unit(ch_tp, "ch_tp");
  const auto& cfg = state.config.interventions;
  const Day today = state.day;
  TestingOutcome out;
  state.diagnosed_today.clear();

  if (ch_tp > 0.0) {
    const double p_other = ch_tp * cfg.asymptomatic_test_factor;
    for (Agent& a : state.agents()) {
      if (a.epi_state == EpiState::kDead || a.diagnosed || a.test_pending_until) continue;
      const double p = is_symptomatic(a.epi_state) ? ch_tp : p_other;
      if (p <= 0.0 || !state.testing_rng.bernoulli(p)) continue;
      ++out.new_tests;
      a.last_test_day = today;
      a.pending_result_positive = is_infected(a.epi_state);
      a.test_pending_until = today + cfg.test_delay;
    }
  }

  for (Agent& a : state.agents()) {
    if (!a.test_pending_until || *a.test_pending_until > today) continue;
    a.test_pending_until.reset();
    if (a.pending_result_positive && a.epi_state != EpiState::kDead && !a.diagnosed) {
      a.diagnosed = true;
      ++out.new_diagnoses;
      state.diagnosed_today.push_back(a.id);
    }
    a.pending_result_positive = false;
  }

  state.cumulative_tests += out.new_tests;
  state.cumulative_diagnoses += out.new_diagnoses;
  return out;
}

// Places contact `c`, identified today, in quarantine starting after the
// trace delay. An active or pending quarantine is extended instead of
// counted again. Returns true for a new quarantine entry.
inline bool quarantine_contact(Agent& c, Day today, const InterventionConfig& cfg) {
  const Day start = today + cfg.trace_delay;
  const Day until = start + cfg.quarantine_duration;
  if (c.quarantined_until && *c.quarantined_until > today) {
    c.quarantined_until = std::max(*c.quarantined_until, until);
    return false;
  }
  c.quarantine_start = start;
  c.quarantined_until = until;
  return true;
}

// Traces the household, school and work contacts (and, if configured, the
// previous day's community contacts) of everyone diagnosed today; each
// contact is identified with probability ch_ctp. Returns new quarantine
// entries.
inline std::int64_t run_tracing(SimState& state, double ch_ctp) {
  detail::require_unit(ch_ctp, "ch_ctp");
  const auto& cfg = state.config.interventions;
  if (ch_ctp <= 0.0) return 0;
  std::int64_t entries = 0;
  auto trace = [&](const ContactLayer& layer, AgentId index_case) {
    for (AgentId cid : layer.neighbors(index_case)) {
      Agent& c = state.agents()[cid];
      if (!state.tracing_rng.bernoulli(ch_ctp)) continue;
      if (c.epi_state == EpiState::kDead || c.diagnosed) continue;
      if (quarantine_contact(c, state.day, cfg)) ++entries;
    }
  };
  for (AgentId id : state.diagnosed_today) {
    trace(state.population.household, id);
    trace(state.population.school, id);
    trace(state.population.work, id);
    if (cfg.trace_community) trace(state.previous_community, id);
  }
  state.cumulative_quarantined += entries;
  return entries;
}

}  // namespace epirl
