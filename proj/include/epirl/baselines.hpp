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
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "epirl/action.hpp"
#include "epirl/csv.hpp"
#include "epirl/types.hpp"

namespace epirl {

// Step function of the day: the latest entry starting at or before the day
// applies. With a cycle length the schedule repeats with that period.
class SchedulePolicy {
 public:
  struct Entry {
    Day start = 0;
    Action action;
    bool operator==(const Entry&) const = default;
  };

  SchedulePolicy() : entries_{{0, kNullAction}} {}

  explicit SchedulePolicy(std::vector<Entry> entries, std::optional<Day> cycle = std::nullopt)
      : entries_(std::move(entries)), cycle_(cycle) {
    if (entries_.empty() || entries_.front().start != 0) {
      throw ParseError("schedule must start at day 0");
    }
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (entries_[i].start <= entries_[i - 1].start) {
        throw ParseError("schedule start days must be strictly increasing");
      }
    }
    if (cycle_ && *cycle_ <= entries_.back().start) {
      throw ParseError("schedule cycle must exceed the last start day");
    }
    for (const auto& e : entries_) validate_simulator_action(e.action);
  }

  Action at(Day day) const {
    if (day < 0) day = 0;
    if (cycle_) day %= *cycle_;
    const auto it = std::upper_bound(entries_.begin(), entries_.end(), day,
                                     [](Day d, const Entry& e) { return d < e.start; });
    return std::prev(it)->action;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::optional<Day> cycle() const { return cycle_; }

  bool operator==(const SchedulePolicy&) const = default;

 private:
  std::vector<Entry> entries_;
  std::optional<Day> cycle_;
};

// 7 normal days, then 7 days with 80% of contacts locked down, repeating.
inline SchedulePolicy seven_work_seven_lockdown(double lockdown_beta = 0.2, double ch_tp = 0.0,
                                                double ch_ctp = 0.0) {
  return SchedulePolicy({{0, {1.0, ch_tp, ch_ctp}}, {7, {lockdown_beta, ch_tp, ch_ctp}}}, 14);
}

inline SchedulePolicy constant_policy(const Action& a) { return SchedulePolicy({{0, a}}); }

// Parses `day,ch_beta,ch_tp,ch_ctp` rows. A schedule whose first row starts
// after day 0 begins with the null action.
inline SchedulePolicy parse_schedule(const csv::Table& t, const std::string& source) {
  csv::require_header(t, {"day", "ch_beta", "ch_tp", "ch_ctp"}, source);
  std::vector<SchedulePolicy::Entry> entries;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = source + ":" + std::to_string(t.line_numbers[r]);
    const auto day = csv::to_integer(row[0], where);
    const Action a{csv::to_double(row[1], where), csv::to_double(row[2], where),
                   csv::to_double(row[3], where)};
    for (double v : a.as_array()) {
      if (v < 0.0 || v > 1.0) throw ParseError(where + ": action components must lie in [0, 1]");
    }
    if (day < 0) throw ParseError(where + ": negative day");
    if (!entries.empty() && day <= entries.back().start) {
      throw ParseError(where + ": days must be strictly increasing");
    }
    entries.push_back({static_cast<Day>(day), a});
  }
  if (entries.empty() || entries.front().start != 0) {
    entries.insert(entries.begin(), {0, kNullAction});
  }
  return SchedulePolicy(std::move(entries));
}

inline SchedulePolicy real_world_schedule(const std::string& path) {
  return parse_schedule(csv::read_file(path), path);
}

// Approximate UK timeline from 2020-01-21 (day 0). The dates follow public
// announcements; the intensities are rough guesses and are NOT an
// authoritative reconstruction. data/uk_approx_schedule.csv holds the same
// rows.
inline constexpr const char* kUkApproxScheduleCsv =
    "# Approximate UK intervention timeline, day 0 = 2020-01-21. Intensities are guesses.\n"
    "day,ch_beta,ch_tp,ch_ctp\n"
    "0,1.0,0.0,0.0\n"
    "# early containment: testing and tracing of travel-linked cases\n"
    "14,1.0,0.10,0.25\n"
    "# community testing and tracing scaled back (12 March)\n"
    "51,1.0,0.05,0.0\n"
    "# distancing advice (16 March)\n"
    "55,0.8,0.05,0.0\n"
    "# national lockdown (23 March)\n"
    "62,0.4,0.10,0.0\n"
    "# testing expansion (mid April)\n"
    "85,0.4,0.25,0.0\n"
    "# first easing, wider testing (11 May)\n"
    "111,0.5,0.30,0.10\n";

inline SchedulePolicy uk_approx_schedule() {
  return parse_schedule(csv::read_string(kUkApproxScheduleCsv, "uk-approx"), "uk-approx");
}

// Builtin name ("7w7l", "uk-approx", "none") or a CSV path.
inline SchedulePolicy schedule_by_name(const std::string& name) {
  if (name == "7w7l") return seven_work_seven_lockdown();
  if (name == "uk-approx") return uk_approx_schedule();
  if (name == "none") return SchedulePolicy();
  return real_world_schedule(name);
}

inline void write_schedule_csv(std::ostream& os, const SchedulePolicy& s) {
  os << "day,ch_beta,ch_tp,ch_ctp\n";
  for (const auto& e : s.entries()) {
    os << e.start << ',' << e.action.ch_beta << ',' << e.action.ch_tp << ',' << e.action.ch_ctp
       << '\n';
  }
}

}  // namespace epirl
