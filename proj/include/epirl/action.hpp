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
#include <cmath>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "epirl/errors.hpp"

namespace epirl {

// Intervention triple: transmission multiplier, daily test probability and
// per-contact trace probability.
struct Action {
  double ch_beta = 1.0;
  double ch_tp = 0.0;
  double ch_ctp = 0.0;

  bool operator==(const Action&) const = default;

  std::array<double, 3> as_array() const { return {ch_beta, ch_tp, ch_ctp}; }
  static Action from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
};

// No lockdown, no testing, no tracing.
inline constexpr Action kNullAction{1.0, 0.0, 0.0};

inline std::ostream& operator<<(std::ostream& os, const Action& a) {
  return os << '(' << a.ch_beta << ", " << a.ch_tp << ", " << a.ch_ctp << ')';
}

enum class ActionSpaceKind { kDiscrete, kContinuous };

inline std::string_view to_string(ActionSpaceKind k) {
  return k == ActionSpaceKind::kDiscrete ? "discrete" : "continuous";
}

inline ActionSpaceKind parse_action_space_kind(std::string_view s) {
  if (s == "discrete") return ActionSpaceKind::kDiscrete;
  if (s == "continuous") return ActionSpaceKind::kContinuous;
  throw ConfigError("unknown action space kind '" + std::string(s) + "'");
}

namespace action_space {

inline constexpr std::array<double, 4> kBetaLevels = {0.5, 0.625, 0.750, 0.875};
inline constexpr std::array<double, 4> kTestLevels = {0.0, 0.25, 0.50, 0.75};
inline constexpr std::array<double, 4> kTraceLevels = {0.0, 0.25, 0.50, 0.75};
inline constexpr std::size_t kDiscreteSize = 64;

inline constexpr std::array<double, 3> kContinuousLow = {0.5, 0.0, 0.0};
inline constexpr std::array<double, 3> kContinuousHigh = {1.0, 1.0, 1.0};

}  // namespace action_space

namespace detail {

inline std::string describe(const Action& a) {
  std::ostringstream os;
  os << a;
  return os.str();
}

inline int level_index(const std::array<double, 4>& levels, double v) {
  for (int i = 0; i < 4; ++i) {
    if (std::abs(levels[static_cast<std::size_t>(i)] - v) <= 1e-12) return i;
  }
  return -1;
}

}  // namespace detail

// Index = i_beta * 16 + i_tp * 4 + i_ctp, levels in ascending order.
inline Action encode_discrete(std::size_t index) {
  if (index >= action_space::kDiscreteSize) {
    throw ActionDomainError("discrete action index " + std::to_string(index) +
                            " outside [0, 63]");
  }
  return {action_space::kBetaLevels[index / 16], action_space::kTestLevels[(index / 4) % 4],
          action_space::kTraceLevels[index % 4]};
}

inline std::size_t decode_discrete(const Action& a) {
  const int b = detail::level_index(action_space::kBetaLevels, a.ch_beta);
  const int t = detail::level_index(action_space::kTestLevels, a.ch_tp);
  const int c = detail::level_index(action_space::kTraceLevels, a.ch_ctp);
  if (b < 0 || t < 0 || c < 0) {
    throw ActionDomainError(detail::describe(a) + " is not a discrete action");
  }
  return static_cast<std::size_t>(b * 16 + t * 4 + c);
}

inline bool in_continuous_box(const Action& a) {
  const auto v = a.as_array();
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(v[i] >= action_space::kContinuousLow[i] && v[i] <= action_space::kContinuousHigh[i])) {
      return false;
    }
  }
  return true;
}

// Domain accepted by the learning action spaces.
inline void validate_action(const Action& a, ActionSpaceKind kind) {
  if (kind == ActionSpaceKind::kDiscrete) {
    (void)decode_discrete(a);
  } else if (!in_continuous_box(a)) {
    throw ActionDomainError(detail::describe(a) +
                            " outside [0.5,1] x [0,1] x [0,1]");
  }
}

// Domain accepted by the simulator itself: every component in [0, 1].
// Schedules (e.g. an 80% lockdown) may leave the learning box.
inline void validate_simulator_action(const Action& a) {
  for (double v : a.as_array()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ActionDomainError(detail::describe(a) + " has a component outside [0, 1]");
    }
  }
}

}  // namespace epirl
