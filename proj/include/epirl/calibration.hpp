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

// Fitting (pop_infected, beta_initial) to observed cumulative confirmed cases
// and deaths: quasi-random global sampling, then Gaussian refinement around
// the incumbent.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "epirl/baselines.hpp"
#include "epirl/config.hpp"
#include "epirl/csv.hpp"
#include "epirl/errors.hpp"
#include "epirl/random.hpp"
#include "epirl/simulation.hpp"

namespace epirl {

inline std::chrono::sys_days parse_date(const std::string& text, const std::string& where = "date") {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
    throw ParseError(where + ": expected an ISO date YYYY-MM-DD, got '" + text + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw ParseError(where + ": invalid date '" + text + "'");
  return std::chrono::sys_days{ymd};
}

inline std::string format_date(std::chrono::sys_days day) {
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

struct ObservedPoint {
  std::chrono::sys_days date;
  double cum_confirmed = 0.0;
  double cum_deaths = 0.0;
};

// National-scale cumulative series.
struct ObservedSeries {
  std::vector<ObservedPoint> points;

  void validate(const std::string& source = "observed") const {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      if (p.cum_confirmed < 0 || p.cum_deaths < 0) throw ParseError(source + ": negative count");
      if (i == 0) continue;
      if (p.date <= points[i - 1].date) throw ParseError(source + ": dates must be strictly increasing");
      if (p.cum_confirmed < points[i - 1].cum_confirmed || p.cum_deaths < points[i - 1].cum_deaths) {
        throw ParseError(source + ": cumulative series must be non-decreasing");
      }
    }
  }
};

inline ObservedSeries parse_observed(const csv::Table& t, const std::string& source) {
  csv::require_header(t, {"date", "cum_confirmed", "cum_deaths"}, source);
  ObservedSeries s;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = source + ":" + std::to_string(t.line_numbers[r]);
    s.points.push_back({parse_date(t.rows[r][0], where), csv::to_double(t.rows[r][1], where),
                        csv::to_double(t.rows[r][2], where)});
  }
  if (s.points.empty()) throw ParseError(source + ": no data rows");
  s.validate(source);
  return s;
}

inline ObservedSeries read_observed(const std::string& path) {
  return parse_observed(csv::read_file(path), path);
}

inline void write_observed_csv(std::ostream& os, const ObservedSeries& s) {
  os << std::setprecision(12) << "date,cum_confirmed,cum_deaths\n";
  for (const auto& p : s.points) {
    os << format_date(p.date) << ',' << p.cum_confirmed << ',' << p.cum_deaths << '\n';
  }
}

// Simulated cumulative diagnoses and deaths, scaled to the real population,
// indexed by day.
struct ScaledSeries {
  std::vector<double> cum_confirmed;
  std::vector<double> cum_deaths;
};

inline ScaledSeries scale_series(const std::vector<DailyCounts>& series, double pop_scale) {
  ScaledSeries s;
  for (const auto& c : series) {
    s.cum_confirmed.push_back(static_cast<double>(c.cumulative_diagnoses) * pop_scale);
    s.cum_deaths.push_back(static_cast<double>(c.cumulative_dead) * pop_scale);
  }
  return s;
}

inline ObservedSeries observed_from_series(const ScaledSeries& s, std::chrono::sys_days start) {
  ObservedSeries o;
  for (std::size_t d = 0; d < s.cum_confirmed.size(); ++d) {
    o.points.push_back({start + std::chrono::days(d), s.cum_confirmed[d], s.cum_deaths[d]});
  }
  return o;
}

struct LossWeights {
  double cases = 1.0;
  double deaths = 1.0;
};

// Weighted mean over the two series of the mean squared relative error
// (sim - obs) / max(obs, 1) on the observed dates the simulation covers.
inline double calibration_loss(const ScaledSeries& sim, const ObservedSeries& obs,
                               std::chrono::sys_days start, const LossWeights& w) {
  double se_cases = 0.0;
  double se_deaths = 0.0;
  std::size_t n = 0;
  for (const auto& p : obs.points) {
    const auto day = (p.date - start).count();
    if (day < 0 || day >= static_cast<std::int64_t>(sim.cum_confirmed.size())) continue;
    const auto k = static_cast<std::size_t>(day);
    const double rc = (sim.cum_confirmed[k] - p.cum_confirmed) / std::max(p.cum_confirmed, 1.0);
    const double rd = (sim.cum_deaths[k] - p.cum_deaths) / std::max(p.cum_deaths, 1.0);
    se_cases += rc * rc;
    se_deaths += rd * rd;
    ++n;
  }
  if (n == 0) throw AlignmentError("simulation and observed series share no dates");
  const double wsum = w.cases + w.deaths;
  if (!(wsum > 0.0)) throw ConfigError("calibration loss weights must sum to a positive value");
  const auto dn = static_cast<double>(n);
  return (w.cases * se_cases / dn + w.deaths * se_deaths / dn) / wsum;
}

// Two-dimensional Sobol sequence with a random digital shift.
class Sobol2 {
 public:
  explicit Sobol2(std::uint64_t seed = 0) {
    for (int k = 0; k < 32; ++k) v_[0][k] = 1u << (31 - k);
    std::uint32_t m = 1;
    for (int k = 0; k < 32; ++k) {
      if (k > 0) m = (m << 1) ^ m;
      v_[1][k] = m << (31 - k);
    }
    if (seed != 0) {
      Rng rng(seed);
      shift_[0] = static_cast<std::uint32_t>(rng.next_u64() >> 32);
      shift_[1] = static_cast<std::uint32_t>(rng.next_u64() >> 32);
    }
  }

  std::array<double, 2> point(std::uint32_t index) const {
    std::array<std::uint32_t, 2> x = shift_;
    for (int k = 0; index != 0; ++k, index >>= 1) {
      if (index & 1u) {
        x[0] ^= v_[0][k];
        x[1] ^= v_[1][k];
      }
    }
    return {x[0] * 0x1.0p-32, x[1] * 0x1.0p-32};
  }

 private:
  std::array<std::array<std::uint32_t, 32>, 2> v_{};
  std::array<std::uint32_t, 2> shift_{0, 0};
};

struct CalibrationSpec {
  Config base;  // everything except the two fitted parameters
  ObservedSeries observed;
  SchedulePolicy schedule;
  std::uint64_t seed = 0;
  // Trials drawn uniformly at random instead of Sobol then local refinement.
  bool pure_random = false;

  const CalibrationConfig& params() const { return base.calibration; }
};

struct Trial {
  std::int64_t index = 0;
  std::string phase;  // global | local | random
  double pop_infected = 0.0;
  double beta_initial = 0.0;
  double loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> replication_losses;
  bool failed = false;
  std::string error;
};

struct CalibrationResult {
  double pop_infected = 0.0;
  double beta_initial = 0.0;
  double loss = 0.0;
  std::int64_t best_trial = 0;
  std::vector<Trial> trials;
};

inline std::uint64_t replication_seed(std::uint64_t seed, std::int64_t r) {
  return derive_seed(derive_seed(seed, "replication"), static_cast<std::uint64_t>(r));
}

// Mean scaled series over `replications` runs with common seeds.
inline std::vector<ScaledSeries> simulate_replications(const Config& cfg,
                                                       const SchedulePolicy& schedule,
                                                       std::uint64_t seed,
                                                       std::int64_t replications) {
  std::vector<ScaledSeries> out;
  const SimulationConfig sc = SimulationConfig::from(cfg);
  for (std::int64_t r = 0; r < replications; ++r) {
    const auto series = run_simulation(sc, replication_seed(seed, r), cfg.n_days,
                                       [&](Day d, const DailyCounts&) { return schedule.at(d); });
    out.push_back(scale_series(series, cfg.population.pop_scale()));
  }
  return out;
}

inline ScaledSeries mean_series(const std::vector<ScaledSeries>& reps) {
  ScaledSeries m;
  if (reps.empty()) return m;
  m.cum_confirmed.assign(reps.front().cum_confirmed.size(), 0.0);
  m.cum_deaths.assign(reps.front().cum_deaths.size(), 0.0);
  for (const auto& r : reps) {
    for (std::size_t d = 0; d < m.cum_confirmed.size(); ++d) {
      m.cum_confirmed[d] += r.cum_confirmed[d] / static_cast<double>(reps.size());
      m.cum_deaths[d] += r.cum_deaths[d] / static_cast<double>(reps.size());
    }
  }
  return m;
}

inline Config with_parameters(Config cfg, double pop_infected, double beta) {
  cfg.population.pop_infected = pop_infected;
  cfg.population.beta_initial = beta;
  return cfg;
}

inline void evaluate_trial(Trial& t, const CalibrationSpec& spec) {
  const auto& p = spec.params();
  const std::chrono::sys_days start = parse_date(p.start_date, "calibration.start_date");
  try {
    const Config cfg = with_parameters(spec.base, t.pop_infected, t.beta_initial);
    validate(cfg);
    const auto reps = simulate_replications(cfg, spec.schedule, spec.seed, p.replications);
    double sum = 0.0;
    for (const auto& r : reps) {
      const double l = calibration_loss(r, spec.observed, start, {p.case_weight, p.death_weight});
      t.replication_losses.push_back(l);
      sum += l;
    }
    t.loss = sum / static_cast<double>(reps.size());
    if (!std::isfinite(t.loss)) throw Error("non-finite loss");
  } catch (const AlignmentError&) {
    throw;
  } catch (const std::exception& e) {
    t.failed = true;
    t.error = e.what();
    t.loss = std::numeric_limits<double>::quiet_NaN();
  }
}

inline CalibrationResult search(const CalibrationSpec& spec) {
  const auto& p = spec.params();
  validate(p);
  parse_date(p.start_date, "calibration.start_date");
  const double pi_lo = p.pop_infected_min;
  const double pi_w = p.pop_infected_max - p.pop_infected_min;
  const double b_lo = p.beta_min;
  const double b_w = p.beta_max - p.beta_min;

  const auto n_global =
      spec.pure_random
          ? p.trials
          : std::clamp<std::int64_t>(std::llround(static_cast<double>(p.trials) * p.global_fraction),
                                     1, p.trials);
  const Sobol2 sobol(derive_seed(spec.seed, "sobol"));
  Rng rng = Rng(spec.seed).substream("calibration");

  CalibrationResult res;
  std::optional<std::size_t> best;
  for (std::int64_t i = 0; i < p.trials; ++i) {
    Trial t;
    t.index = i;
    std::array<double, 2> u{};
    if (spec.pure_random) {
      t.phase = "random";
      u = {rng.uniform(), rng.uniform()};
    } else if (i < n_global || !best) {
      t.phase = "global";
      u = sobol.point(static_cast<std::uint32_t>(i));
    } else {
      t.phase = "local";
      const Trial& inc = res.trials[*best];
      const double u0 = pi_w > 0 ? (inc.pop_infected - pi_lo) / pi_w : 0.0;
      const double u1 = b_w > 0 ? (inc.beta_initial - b_lo) / b_w : 0.0;
      u = {std::clamp(rng.normal(u0, p.local_scale), 0.0, 1.0),
           std::clamp(rng.normal(u1, p.local_scale), 0.0, 1.0)};
    }
    t.pop_infected = pi_lo + u[0] * pi_w;
    t.beta_initial = b_lo + u[1] * b_w;
    evaluate_trial(t, spec);
    res.trials.push_back(t);
    if (!t.failed && (!best || t.loss < res.trials[*best].loss)) best = res.trials.size() - 1;
  }
  if (!best) throw SearchError("all " + std::to_string(p.trials) + " calibration trials failed");
  const Trial& b = res.trials[*best];
  res.pop_infected = b.pop_infected;
  res.beta_initial = b.beta_initial;
  res.loss = b.loss;
  res.best_trial = b.index;
  return res;
}

inline void write_trial_log_csv(std::ostream& os, const CalibrationResult& r) {
  os << std::setprecision(12)
     << "trial,phase,pop_infected,beta_initial,loss,replication_losses,status\n";
  for (const auto& t : r.trials) {
    os << t.index << ',' << t.phase << ',' << t.pop_infected << ',' << t.beta_initial << ',';
    if (t.failed) {
      os << ",,failed\n";
      continue;
    }
    os << t.loss << ',';
    for (std::size_t k = 0; k < t.replication_losses.size(); ++k) {
      os << (k ? ";" : "") << t.replication_losses[k];
    }
    os << ",ok\n";
  }
}

// Config overlay that applies the fitted parameters.
inline json best_params_overlay(const CalibrationResult& r) {
  return {{"population", {{"pop_infected", r.pop_infected}, {"beta_initial", r.beta_initial}}}};
}

inline void write_fit_csv(std::ostream& os, const ScaledSeries& fit, const ObservedSeries& obs,
                          std::chrono::sys_days start) {
  os << std::setprecision(12) << "date,day,obs_cum_confirmed,sim_cum_confirmed,obs_cum_deaths,sim_cum_deaths\n";
  for (std::size_t d = 0; d < fit.cum_confirmed.size(); ++d) {
    const auto date = start + std::chrono::days(d);
    const auto it = std::find_if(obs.points.begin(), obs.points.end(),
                                 [&](const ObservedPoint& p) { return p.date == date; });
    os << format_date(date) << ',' << d << ',';
    if (it != obs.points.end()) os << it->cum_confirmed;
    os << ',' << fit.cum_confirmed[d] << ',';
    if (it != obs.points.end()) os << it->cum_deaths;
    os << ',' << fit.cum_deaths[d] << '\n';
  }
}

}  // namespace epirl
