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

// Health and economic rewards, the action-change penalty, their combination,
// and the daily economic loss fraction.
//
//   r_H = N_R - w1 N_I - w2 N_S - w3 N_D
//   r_E = mu1 C_E - mu2 C_T - mu3 C_Q - mu4 C_beta
//   C_E = P - M_I - M_Q - M_D,  C_beta = P (1 - ch_beta)
//   L_E = (mu1 P - r_E) / (mu1 P)
//
// P is the simulated population size. C_T and C_Q are per-unit costs of the
// day's new tests and new quarantine entries; quarantine days themselves are
// already inside C_E through M_Q.

#include <cmath>
#include <optional>

#include "epirl/action.hpp"
#include "epirl/config.hpp"
#include "epirl/types.hpp"

namespace epirl {

inline double health_reward(const DailyCounts& c, const RewardWeights& w) {
  return static_cast<double>(c.new_recovered) - w.omega1 * static_cast<double>(c.new_infections) -
         w.omega2 * static_cast<double>(c.new_severe) - w.omega3 * static_cast<double>(c.new_deaths);
}

struct EconomicReward {
  double working = 0.0;        // C_E
  double testing_cost = 0.0;   // C_T
  double quarantine_cost = 0.0;  // C_Q
  double lockdown_cost = 0.0;  // C_beta
  double r_E = 0.0;
  double r_E_scaled = 0.0;
};

inline EconomicReward economic_reward(const DailyCounts& c, const Action& action,
                                      const RewardWeights& w, double population) {
  EconomicReward e;
  e.working = population - static_cast<double>(c.currently_infected) -
              static_cast<double>(c.currently_quarantined) - static_cast<double>(c.cumulative_dead);
  e.testing_cost = w.cost_per_test * static_cast<double>(c.new_tests);
  e.quarantine_cost = w.quarantine_processing_cost * static_cast<double>(c.new_quarantined);
  e.lockdown_cost = population * (1.0 - action.ch_beta);
  e.r_E = w.mu1 * e.working - w.mu2 * e.testing_cost - w.mu3 * e.quarantine_cost -
          w.mu4 * e.lockdown_cost;
  e.r_E_scaled = w.economic_scale * e.r_E / population;
  return e;
}

// Penalty for changing a continuous action by more than 0.2 in a component:
// -100 (d - 0.2) per such component, summed.
inline double action_penalty(const Action& current, const Action& previous, ActionSpaceKind kind) {
  if (kind != ActionSpaceKind::kContinuous) {
    throw ProtocolError("the action-change penalty is defined for continuous actions only");
  }
  const auto a = current.as_array();
  const auto b = previous.as_array();
  double penalty = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > 0.2) penalty += -100.0 * (d - 0.2);
  }
  return penalty;
}

inline double combine(double r_H, double r_E_scaled, std::optional<double> r_P,
                      const RewardWeights& w) {
  double r = w.lambda1 * r_H + w.lambda2 * r_E_scaled;
  if (r_P) r += w.lambda3 * *r_P;
  return r;
}

// Fraction of the no-epidemic economy mu1 * P lost on a day with reward r_E.
inline double economic_loss(double r_E, const RewardWeights& w, double population) {
  const double full = w.mu1 * population;
  return (full - r_E) / full;
}

// Everything the environment logs for one simulated day.
struct DailyReward {
  double r_H = 0.0;
  EconomicReward economic;
  double loss = 0.0;      // L_E
  double combined = 0.0;  // lambda1 r_H + lambda2 r_E_scaled
};

inline DailyReward daily_reward(const DailyCounts& c, const Action& applied, const RewardWeights& w,
                                double population) {
  DailyReward d;
  d.r_H = health_reward(c, w);
  d.economic = economic_reward(c, applied, w, population);
  d.loss = economic_loss(d.economic.r_E, w, population);
  d.combined = combine(d.r_H, d.economic.r_E_scaled, std::nullopt, w);
  return d;
}

}  // namespace epirl
