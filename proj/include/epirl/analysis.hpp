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

// Post-hoc metrics over completed runs: the reproduction number, economic
// loss, and side-by-side strategy comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "epirl/action.hpp"
#include "epirl/errors.hpp"
#include "epirl/types.hpp"

namespace epirl {

struct RtPoint {
  Day day = 0;
  double rt = 0.0;
  bool operator==(const RtPoint&) const = default;
};

// R_t = mean(new infections) / mean(infectious) * duration over a trailing
// window of up to `window` days. Days whose window has no infectious agent are
// omitted.
inline std::vector<RtPoint> estimate_rt(std::span<const DailyCounts> series,
                                        double mean_infectious_duration, int window = 7) {
  if (mean_infectious_duration <= 0.0) throw ConfigError("mean infectious duration must be > 0");
  if (window < 1) throw ConfigError("R_t window must be >= 1 day");
  std::vector<RtPoint> out;
  for (std::size_t t = 0; t < series.size(); ++t) {
    const std::size_t lo = t + 1 >= static_cast<std::size_t>(window) ? t + 1 - window : 0;
    double inc = 0.0;
    double prev = 0.0;
    for (std::size_t k = lo; k <= t; ++k) {
      inc += static_cast<double>(series[k].new_infections);
      prev += static_cast<double>(series[k].I);
    }
    if (prev <= 0.0) continue;
    out.push_back({series[t].day, std::max(0.0, inc / prev * mean_infectious_duration)});
  }
  return out;
}

// First day from which R_t stays below 1 for `sustain` consecutive estimates,
// counted after the estimate has been at or above 1. A run that never reaches
// 1 crosses at its first estimate.
inline std::optional<Day> rt_crossing_day(std::span<const RtPoint> rt, int sustain = 7) {
  bool seen_above = std::none_of(rt.begin(), rt.end(), [](const RtPoint& p) { return p.rt >= 1.0; });
  for (std::size_t i = 0; i < rt.size(); ++i) {
    if (rt[i].rt >= 1.0) {
      seen_above = true;
      continue;
    }
    if (!seen_above) continue;
    std::size_t j = i;
    while (j < rt.size() && rt[j].rt < 1.0 && j - i < static_cast<std::size_t>(sustain)) ++j;
    if (j - i == static_cast<std::size_t>(sustain) || j == rt.size()) return rt[i].day;
  }
  return std::nullopt;
}

// Mean daily economic loss of a trace, as a percentage.
inline double aggregate_economic_loss(std::span<const double> daily_loss) {
  if (daily_loss.empty()) return 0.0;
  double s = 0.0;
  for (double l : daily_loss) s += l;
  return 100.0 * s / static_cast<double>(daily_loss.size());
}

struct EpisodeMetrics {
  std::uint64_t seed = 0;
  double total_return = 0.0;
  double cumulative_infections = 0.0;
  double deaths = 0.0;
  double economic_loss_pct = 0.0;
  std::optional<Day> rt_cross_day;
  std::vector<Action> actions;  // applied action of each step
  std::vector<Action> daily_actions;
  std::vector<DailyCounts> series;
  std::vector<double> daily_loss;
  std::vector<RtPoint> rt;
};

struct StrategyMetrics {
  std::string name;
  std::vector<EpisodeMetrics> episodes;

  std::vector<std::uint64_t> seeds() const {
    std::vector<std::uint64_t> s;
    for (const auto& e : episodes) s.push_back(e.seed);
    return s;
  }
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
  bool operator==(const MeanSd&) const = default;
};

inline MeanSd mean_sd(std::span<const double> v) {
  MeanSd r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    for (double x : v) r.sd += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(r.sd / static_cast<double>(v.size() - 1));
  }
  return r;
}

struct ComparisonRow {
  std::string name;
  std::size_t n = 0;
  MeanSd infections;
  MeanSd deaths;
  MeanSd economic_loss_pct;
  MeanSd total_return;
  MeanSd rt_cross_day;       // over episodes that crossed
  std::size_t n_crossed = 0;
  bool operator==(const ComparisonRow&) const = default;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::vector<std::uint64_t> seeds;
};

inline ComparisonRow summarize(const StrategyMetrics& s) {
  ComparisonRow row;
  row.name = s.name;
  row.n = s.episodes.size();
  std::vector<double> inf, dead, loss, ret, cross;
  for (const auto& e : s.episodes) {
    inf.push_back(e.cumulative_infections);
    dead.push_back(e.deaths);
    loss.push_back(e.economic_loss_pct);
    ret.push_back(e.total_return);
    if (e.rt_cross_day) cross.push_back(*e.rt_cross_day);
  }
  row.infections = mean_sd(inf);
  row.deaths = mean_sd(dead);
  row.economic_loss_pct = mean_sd(loss);
  row.total_return = mean_sd(ret);
  row.rt_cross_day = mean_sd(cross);
  row.n_crossed = cross.size();
  return row;
}

inline ComparisonReport compare_strategies(std::span<const StrategyMetrics> strategies) {
  if (strategies.size() < 2) throw ProtocolError("comparison needs at least two strategies");
  ComparisonReport rep;
  rep.seeds = strategies.front().seeds();
  for (const auto& s : strategies) {
    if (s.seeds() != rep.seeds) {
      throw ProtocolError("strategy '" + s.name + "' was evaluated on a different seed set");
    }
    rep.rows.push_back(summarize(s));
  }
  return rep;
}

inline void write_report_csv(std::ostream& os, const ComparisonReport& r) {
  os << std::setprecision(10)
     << "strategy,n,infections_mean,infections_sd,deaths_mean,deaths_sd,economic_loss_pct_mean,"
        "economic_loss_pct_sd,return_mean,return_sd,rt_cross_day_mean,rt_cross_day_sd,n_crossed\n";
  for (const auto& row : r.rows) {
    os << row.name << ',' << row.n << ',' << row.infections.mean << ',' << row.infections.sd << ','
       << row.deaths.mean << ',' << row.deaths.sd << ',' << row.economic_loss_pct.mean << ','
       << row.economic_loss_pct.sd << ',' << row.total_return.mean << ',' << row.total_return.sd
       << ',' << row.rt_cross_day.mean << ',' << row.rt_cross_day.sd << ',' << row.n_crossed
       << '\n';
  }
}

inline void write_report_text(std::ostream& os, const ComparisonReport& r) {
  os << "seeds:";
  for (auto s : r.seeds) os << ' ' << s;
  os << "\n\n";
  auto pm = [](const MeanSd& m, int prec) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << m.mean << " +/- " << m.sd;
    return s.str();
  };
  os << std::left << std::setw(24) << "strategy" << std::setw(24) << "infections" << std::setw(20)
     << "deaths" << std::setw(22) << "economic loss %" << std::setw(26) << "return"
     << "R_t < 1 from day\n";
  for (const auto& row : r.rows) {
    os << std::left << std::setw(24) << row.name << std::setw(24) << pm(row.infections, 1)
       << std::setw(20) << pm(row.deaths, 1) << std::setw(22) << pm(row.economic_loss_pct, 2)
       << std::setw(26) << pm(row.total_return, 1);
    if (row.n_crossed) {
      os << pm(row.rt_cross_day, 1) << " (" << row.n_crossed << '/' << row.n << ")";
    } else {
      os << "never";
    }
    os << '\n';
  }
}

inline void write_rt_csv(std::ostream& os, std::span<const RtPoint> rt) {
  os << std::setprecision(10) << "day,rt\n";
  for (const auto& p : rt) os << p.day << ',' << p.rt << '\n';
}

}  // namespace epirl
