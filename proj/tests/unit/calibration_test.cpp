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


#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "epirl.hpp"

namespace epirl {
namespace {

using std::chrono::days;

TEST(Dates, ParseAndFormat) {
  const auto d = parse_date("2020-03-23");
  EXPECT_EQ(format_date(d), "2020-03-23");
  EXPECT_EQ((d - parse_date("2020-01-21")).count(), 62);
  EXPECT_EQ(format_date(parse_date("2020-02-28") + days(1)), "2020-02-29");
  EXPECT_THROW(parse_date("2020-02-30"), ParseError);
  EXPECT_THROW(parse_date("23/03/2020"), ParseError);
  EXPECT_THROW(parse_date("2020-03-23x"), ParseError);
}

TEST(Observed, ParsesAndValidates) {
  const auto s = parse_observed(
      csv::read_string("date,cum_confirmed,cum_deaths\n2020-03-01,10,0\n2020-03-02,15,1\n", "o"), "o");
  ASSERT_EQ(s.points.size(), 2u);
  EXPECT_EQ(s.points[1].cum_confirmed, 15.0);
  auto bad = [](const std::string& body) {
    return parse_observed(csv::read_string("date,cum_confirmed,cum_deaths\n" + body, "o"), "o");
  };
  EXPECT_THROW(bad(""), ParseError);
  EXPECT_THROW(bad("2020-03-02,1,0\n2020-03-01,2,0\n"), ParseError);
  EXPECT_THROW(bad("2020-03-01,5,0\n2020-03-02,4,0\n"), ParseError);
  EXPECT_THROW(bad("2020-03-01,-1,0\n"), ParseError);
  EXPECT_THROW(bad("2020-03-01,abc,0\n"), ParseError);
  EXPECT_THROW(parse_observed(csv::read_string("day,cases\n1,2\n", "o"), "o"), ParseError);
}

TEST(Observed, RoundTripThroughCsv) {
  const ScaledSeries s{{1, 2.5, 7}, {0, 0, 1}};
  const auto o = observed_from_series(s, parse_date("2020-01-21"));
  std::ostringstream os;
  write_observed_csv(os, o);
  const auto back = parse_observed(csv::read_string(os.str(), "o"), "o");
  ASSERT_EQ(back.points.size(), 3u);
  EXPECT_EQ(format_date(back.points[2].date), "2020-01-23");
  EXPECT_EQ(back.points[1].cum_confirmed, 2.5);
}

TEST(Observed, SampleDataFileLoads) {
  const auto s = read_observed(std::string(EPIRL_SOURCE_DIR) + "/data/synthetic_observed.csv");
  EXPECT_EQ(s.points.size(), 133u);
  EXPECT_EQ(format_date(s.points.front().date), "2020-01-21");
}

TEST(CalibrationLoss, Examples) {
  const auto start = parse_date("2020-01-21");
  const ScaledSeries sim{{100, 200}, {10, 20}};
  EXPECT_EQ(calibration_loss(sim, observed_from_series(sim, start), start, {}), 0.0);
  // cases off by 10% on both days, deaths exact
  const ScaledSeries obs{{100 / 1.1, 200 / 1.1}, {10, 20}};
  EXPECT_NEAR(calibration_loss(sim, observed_from_series(obs, start), start, {1, 1}), 0.01 / 2, 1e-12);
  EXPECT_NEAR(calibration_loss(sim, observed_from_series(obs, start), start, {3, 1}), 0.03 / 4, 1e-12);
  // zero observations are compared on an absolute scale
  const ScaledSeries zero{{0, 0}, {0, 0}};
  const ScaledSeries small{{0.5, 0.5}, {0, 0}};
  EXPECT_NEAR(calibration_loss(small, observed_from_series(zero, start), start, {1, 0}), 0.25, 1e-12);
}

TEST(CalibrationLoss, OnlyOverlappingDatesCount) {
  const auto start = parse_date("2020-01-21");
  const ScaledSeries sim{{1, 1, 1}, {0, 0, 0}};
  ObservedSeries o = observed_from_series(ScaledSeries{{1, 1, 1, 5, 5}, {0, 0, 0, 0, 0}}, start);
  EXPECT_EQ(calibration_loss(sim, o, start, {}), 0.0);
  o = observed_from_series(sim, start + days(10));
  EXPECT_THROW(calibration_loss(sim, o, start, {}), AlignmentError);
  EXPECT_THROW(calibration_loss(sim, observed_from_series(sim, start), start, {0, 0}), ConfigError);
}

TEST(Sobol, FirstPointsAreStratified) {
  const Sobol2 s;
  std::set<std::pair<double, double>> first4;
  for (std::uint32_t i = 0; i < 4; ++i) first4.insert({s.point(i)[0], s.point(i)[1]});
  EXPECT_EQ(first4, (std::set<std::pair<double, double>>{{0, 0}, {0.5, 0.5}, {0.25, 0.75}, {0.75, 0.25}}));
  for (const Sobol2& seq : {Sobol2(), Sobol2(99)}) {
    for (int dim = 0; dim < 2; ++dim) {
      std::set<int> cells;
      for (std::uint32_t i = 0; i < 64; ++i) cells.insert(int(seq.point(i)[dim] * 64));
      EXPECT_EQ(cells.size(), 64u);
    }
  }
  EXPECT_NE(Sobol2(1).point(0), Sobol2(2).point(0));
}

CalibrationSpec small_spec(std::int64_t trials) {
  CalibrationSpec spec;
  spec.base.population.pop_size = 500;
  spec.base.n_days = 40;
  spec.base.calibration.trials = trials;
  spec.base.calibration.replications = 1;
  spec.base.calibration.pop_infected_min = 5000;
  spec.base.calibration.pop_infected_max = 40000;
  spec.seed = 3;
  const Config truth = with_parameters(spec.base, 20000, 0.008);
  spec.observed = observed_from_series(mean_series(simulate_replications(truth, spec.schedule, 3, 1)),
                                       parse_date(spec.base.calibration.start_date));
  return spec;
}

TEST(Search, DeterministicAndPhased) {
  const auto spec = small_spec(10);
  const auto a = search(spec);
  const auto b = search(spec);
  ASSERT_EQ(a.trials.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(a.trials[i].loss, b.trials[i].loss);
    EXPECT_EQ(a.trials[i].phase, i < 7 ? "global" : "local");
    EXPECT_GE(a.trials[i].beta_initial, spec.base.calibration.beta_min);
    EXPECT_LE(a.trials[i].beta_initial, spec.base.calibration.beta_max);
  }
  for (const auto& t : a.trials) EXPECT_GE(t.loss, a.loss);
  EXPECT_EQ(a.trials[a.best_trial].loss, a.loss);
}

TEST(Search, SingleTrial) {
  const auto r = search(small_spec(1));
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_EQ(r.best_trial, 0);
  std::ostringstream os;
  write_trial_log_csv(os, r);
  EXPECT_EQ(csv::read_string(os.str(), "log").rows.size(), 1u);
}

TEST(Search, PureRandomPhase) {
  auto spec = small_spec(3);
  spec.pure_random = true;
  for (const auto& t : search(spec).trials) EXPECT_EQ(t.phase, "random");
}

TEST(Search, MisalignedObservationsAbort) {
  auto spec = small_spec(2);
  spec.base.calibration.start_date = "2021-01-01";
  EXPECT_THROW(search(spec), AlignmentError);
}

TEST(Search, AllTrialsFailing) {
  auto spec = small_spec(2);
  spec.base.calibration.pop_infected_min = 1e9;
  spec.base.calibration.pop_infected_max = 2e9;
  EXPECT_THROW(search(spec), SearchError);
}

TEST(Search, OverlayReloads) {
  const auto r = search(small_spec(2));
  Config c = config_from_json(best_params_overlay(r));
  EXPECT_EQ(c.population.pop_infected, r.pop_infected);
  EXPECT_EQ(c.population.beta_initial, r.beta_initial);
}

TEST(Replications, CommonSeedsAndMean) {
  const auto spec = small_spec(1);
  const auto a = simulate_replications(spec.base, spec.schedule, 5, 3);
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].cum_confirmed, simulate_replications(spec.base, spec.schedule, 5, 1)[0].cum_confirmed);
  const auto m = mean_series(a);
  for (std::size_t d = 0; d < m.cum_deaths.size(); ++d) {
    EXPECT_NEAR(m.cum_deaths[d], (a[0].cum_deaths[d] + a[1].cum_deaths[d] + a[2].cum_deaths[d]) / 3, 1e-9);
  }
}

}  // namespace
}  // namespace epirl
