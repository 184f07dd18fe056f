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

#include <cstdint>
#include <vector>

#include "epirl/config.hpp"
#include "epirl/population.hpp"
#include "epirl/random.hpp"
#include "epirl/types.hpp"

namespace epirl {

struct SimulationConfig {
  PopulationConfig population;
  DiseaseConfig disease;
  InterventionConfig interventions;

  static SimulationConfig from(const Config& c) { return {c.population, c.disease, c.interventions}; }
};

// Everything a running simulation mutates. Each stochastic mechanism owns a
// named substream of the master seed so that switching one mechanism off
// leaves the draws of the others untouched.
struct SimState {
  SimulationConfig config;
  Day day = 0;  // next day to simulate
  Population population;
  std::vector<double> susceptibility;  // per-agent odds-ratio multiplier
  ContactLayer community;
  ContactLayer previous_community;

  Rng transmission_rng;
  Rng community_rng;
  Rng progression_rng;
  Rng testing_rng;
  Rng tracing_rng;

  std::int64_t cumulative_infections = 0;
  std::int64_t cumulative_tests = 0;
  std::int64_t cumulative_quarantined = 0;
  std::int64_t cumulative_diagnoses = 0;
  std::vector<AgentId> diagnosed_today;

  std::vector<Agent>& agents() { return population.agents; }
  const std::vector<Agent>& agents() const { return population.agents; }
};

}  // namespace epirl
