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

// Environment contract the learning agents are written against.

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "epirl/action.hpp"

namespace epirl {

struct ActionSpec {
  ActionSpaceKind kind = ActionSpaceKind::kDiscrete;
  std::size_t n = 0;         // discrete: number of actions
  std::vector<double> low;   // continuous: per-dimension box
  std::vector<double> high;

  std::size_t dims() const { return kind == ActionSpaceKind::kDiscrete ? 1 : low.size(); }
};

using AgentAction = std::variant<std::size_t, std::vector<double>>;

struct Transition {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
};

class RlEnv {
 public:
  virtual ~RlEnv() = default;
  virtual std::size_t observation_dim() const = 0;
  virtual ActionSpec action_spec() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual Transition step(const AgentAction& action) = 0;
};

}  // namespace epirl
