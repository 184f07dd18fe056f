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
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "epirl/errors.hpp"

namespace epirl {

using Day = std::int32_t;
using AgentId = std::uint32_t;

enum class EpiState : std::uint8_t {
  kSusceptible,
  kExposed,
  kInfectiousAsymptomatic,
  kInfectiousMild,
  kInfectiousSevere,
  kRecovered,
  kDead,
};

constexpr bool is_infectious(EpiState s) {
  return s == EpiState::kInfectiousAsymptomatic || s == EpiState::kInfectiousMild ||
         s == EpiState::kInfectiousSevere;
}

constexpr bool is_symptomatic(EpiState s) {
  return s == EpiState::kInfectiousMild || s == EpiState::kInfectiousSevere;
}

// Exposed or infectious: what a (perfect) test detects.
constexpr bool is_infected(EpiState s) { return s == EpiState::kExposed || is_infectious(s); }

constexpr bool is_absorbing(EpiState s) {
  return s == EpiState::kRecovered || s == EpiState::kDead;
}

constexpr std::string_view to_string(EpiState s) {
  switch (s) {
    case EpiState::kSusceptible: return "susceptible";
    case EpiState::kExposed: return "exposed";
    case EpiState::kInfectiousAsymptomatic: return "infectious_asymptomatic";
    case EpiState::kInfectiousMild: return "infectious_mild";
    case EpiState::kInfectiousSevere: return "infectious_severe";
    case EpiState::kRecovered: return "recovered";
    case EpiState::kDead: return "dead";
  }
  return "unknown";
}

inline constexpr std::uint32_t kNoGroup = 0xffffffffu;

struct Agent {
  AgentId id = 0;
  double age = 0.0;
  EpiState epi_state = EpiState::kSusceptible;
  Day state_entry_day = 0;
  std::optional<Day> scheduled_transition_day;
  // Set on E->I for symptomatic cases that will turn severe.
  std::optional<Day> severe_onset_day;
  bool will_die = false;
  bool diagnosed = false;
  std::optional<Day> last_test_day;
  std::optional<Day> test_pending_until;
  bool pending_result_positive = false;
  // Quarantine covers [quarantine_start, quarantined_until).
  std::optional<Day> quarantine_start;
  std::optional<Day> quarantined_until;
  std::uint32_t household = kNoGroup;
  std::uint32_t school = kNoGroup;
  std::uint32_t workplace = kNoGroup;

  bool quarantined_on(Day day) const {
    return quarantine_start && quarantined_until && *quarantine_start <= day &&
           day < *quarantined_until;
  }
};

// Per-day stocks and flows. Stocks are end-of-day values.
struct DailyCounts {
  Day day = 0;
  std::int64_t S = 0;
  std::int64_t E = 0;
  std::int64_t I = 0;
  std::int64_t R = 0;
  std::int64_t D = 0;
  std::int64_t new_infections = 0;
  std::int64_t new_severe = 0;
  std::int64_t new_deaths = 0;
  std::int64_t new_recovered = 0;
  std::int64_t new_tests = 0;
  std::int64_t new_quarantined = 0;
  std::int64_t new_diagnoses = 0;
  std::int64_t cumulative_tests = 0;
  std::int64_t cumulative_quarantined = 0;
  std::int64_t cumulative_diagnoses = 0;
  std::int64_t currently_infected = 0;
  std::int64_t currently_quarantined = 0;
  std::int64_t cumulative_dead = 0;
  // Seeded plus transmitted infections; not a CSV column.
  std::int64_t cumulative_infections = 0;

  std::int64_t total() const { return S + E + I + R + D; }

  static constexpr std::array<std::string_view, 19> kColumns = {
      "day",
      "S",
      "E",
      "I",
      "R",
      "D",
      "new_infections",
      "new_severe",
      "new_deaths",
      "new_recovered",
      "new_tests",
      "new_quarantined",
      "new_diagnoses",
      "cumulative_tests",
      "cumulative_quarantined",
      "cumulative_diagnoses",
      "currently_infected",
      "currently_quarantined",
      "cumulative_dead",
  };

  std::array<std::int64_t, 19> values() const {
    return {day,
            S,
            E,
            I,
            R,
            D,
            new_infections,
            new_severe,
            new_deaths,
            new_recovered,
            new_tests,
            new_quarantined,
            new_diagnoses,
            cumulative_tests,
            cumulative_quarantined,
            cumulative_diagnoses,
            currently_infected,
            currently_quarantined,
            cumulative_dead};
  }

  bool operator==(const DailyCounts&) const = default;
};

inline void write_counts_csv(std::ostream& os, const std::vector<DailyCounts>& series) {
  for (std::size_t i = 0; i < DailyCounts::kColumns.size(); ++i) {
    os << (i ? "," : "") << DailyCounts::kColumns[i];
  }
  os << '\n';
  for (const auto& row : series) {
    const auto v = row.values();
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << '\n';
  }
}

}  // namespace epirl
