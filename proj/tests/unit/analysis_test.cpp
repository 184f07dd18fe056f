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

#include <sstream>

#include "epirl.hpp"

namespace epirl {
namespace {

std::vector<DailyCounts> series(const std::vector<std::int64_t>& infectious,
                                const std::vector<std::int64_t>& incidence) {
  std::vector<DailyCounts> s(infectious.size());
  for (std::size_t d = 0; d < s.size(); ++d) {
    s[d].day = static_cast<Day>(d);
    s[d].I = infectious[d];
    s[d].new_infections = incidence[d];
  }
  return s;
}

std::vector<RtPoint> rt_of(const std::vector<double>& v) {
  std::vector<RtPoint> r;
  for (std::size_t i = 0; i < v.size(); ++i) r.push_back({static_cast<Day>(i), v[i]});
  return r;
}

TEST(Rt, SteadyStateIsOne) {
  const auto s = series(std::vector<std::int64_t>(20, 400), std::vector<std::int64_t>(20, 50));
  for (const auto& p : estimate_rt(s, 8.0)) EXPECT_DOUBLE_EQ(p.rt, 1.0);
}

TEST(Rt, TrailingWindow) {
  const auto s = series({10, 10, 10, 20, 20}, {1, 2, 3, 4, 5});
  const auto r = estimate_rt(s, 2.0, 3);
  ASSERT_EQ(r.size(), 5u);
  EXPECT_DOUBLE_EQ(r[0].rt, 1.0 / 10 * 2);
  EXPECT_DOUBLE_EQ(r[1].rt, 3.0 / 20 * 2);
  EXPECT_DOUBLE_EQ(r[4].rt, 12.0 / 50 * 2);
}

TEST(Rt, SkipsDaysWithoutInfectious) {
  const auto s = series({0, 0, 5, 0, 0, 0}, {0, 0, 1, 0, 0, 0});
  const auto r = estimate_rt(s, 8.0, 2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].day, 2);
  EXPECT_EQ(r[1].day, 3);
  EXPECT_THROW(estimate_rt(s, 0.0), ConfigError);
  EXPECT_THROW(estimate_rt(s, 8.0, 0), ConfigError);
}

TEST(Rt, ZeroIncidenceIsZero) {
  for (const auto& p : estimate_rt(series({5, 5, 5}, {0, 0, 0}), 8.0)) EXPECT_EQ(p.rt, 0.0);
}

TEST(RtCrossing, NeedsSustainedDrop) {
  EXPECT_EQ(rt_crossing_day(rt_of({2, 2, 0.5, 0.5, 2, 0.9, 0.9, 0.9}), 3), Day{5});
  EXPECT_EQ(rt_crossing_day(rt_of({2, 2, 0.5, 0.5, 2, 2}), 3), std::nullopt);
  EXPECT_EQ(rt_crossing_day(rt_of({2, 1.0, 0.99}), 3), Day{2});  // runs to the end
}

TEST(RtCrossing, NeverAboveCrossesAtStart) {
  EXPECT_EQ(rt_crossing_day(rt_of({0.5, 0.7, 0.2})), Day{0});
  EXPECT_EQ(rt_crossing_day(rt_of({})), std::nullopt);
  EXPECT_EQ(rt_crossing_day(rt_of({1.5, 1.2, 1.0})), std::nullopt);
}

TEST(Summary, MeanSd) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  const auto m = mean_sd(v);
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  EXPECT_NEAR(m.sd, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(mean_sd(std::vector<double>{3}), (MeanSd{3, 0}));
  EXPECT_EQ(mean_sd(std::vector<double>{}), (MeanSd{0, 0}));
}

TEST(Summary, EconomicLossPercentage) {
  EXPECT_DOUBLE_EQ(aggregate_economic_loss(std::vector<double>{0.1, 0.3}), 20.0);
  EXPECT_EQ(aggregate_economic_loss(std::vector<double>{}), 0.0);
}

StrategyMetrics strategy(std::string name, std::vector<std::uint64_t> seeds, double infections) {
  StrategyMetrics s;
  s.name = std::move(name);
  for (auto seed : seeds) {
    EpisodeMetrics e;
    e.seed = seed;
    e.cumulative_infections = infections + double(seed);
    e.rt_cross_day = seed % 2 ? std::optional<Day>(10 * seed) : std::nullopt;
    s.episodes.push_back(e);
  }
  return s;
}

TEST(Compare, RowsAndErrors) {
  const std::vector<StrategyMetrics> ok{strategy("a", {1, 2, 3}, 100), strategy("b", {1, 2, 3}, 10)};
  const auto rep = compare_strategies(ok);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rep.rows[0].infections.mean, 102.0);
  EXPECT_DOUBLE_EQ(rep.rows[1].infections.sd, 1.0);
  EXPECT_EQ(rep.rows[0].n_crossed, 2u);
  EXPECT_DOUBLE_EQ(rep.rows[0].rt_cross_day.mean, 20.0);

  const std::vector<StrategyMetrics> one{strategy("a", {1}, 0)};
  EXPECT_THROW(compare_strategies(one), ProtocolError);
  const std::vector<StrategyMetrics> mismatch{strategy("a", {1, 2}, 0), strategy("b", {1, 3}, 0)};
  EXPECT_THROW(compare_strategies(mismatch), ProtocolError);
}

TEST(Compare, Writers) {
  const std::vector<StrategyMetrics> s{strategy("a", {1, 3}, 100), strategy("b", {1, 3}, 10)};
  const auto rep = compare_strategies(s);
  std::ostringstream csvout, text;
  write_report_csv(csvout, rep);
  write_report_text(text, rep);
  const auto t = csv::read_string(csvout.str(), "report");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][0], "b");
  EXPECT_NE(text.str().find("seeds: 1 3"), std::string::npos);
  EXPECT_NE(text.str().find("(2/2)"), std::string::npos);
}

TEST(PolicySpecs, Parse) {
  EXPECT_EQ(parse_policy_spec("none").kind, PolicySpec::Kind::kNone);
  const auto s = parse_policy_spec("schedule:7w7l");
  EXPECT_EQ(s.kind, PolicySpec::Kind::kSchedule);
  EXPECT_EQ(policy_label(s), "schedule_7w7l");
  const auto c = parse_policy_spec("constant:0.6,0.2,0");
  EXPECT_EQ(c.constant, (Action{0.6, 0.2, 0.0}));
  EXPECT_THROW(parse_policy_spec("constant:0.6,0.2"), ConfigError);
  EXPECT_THROW(parse_policy_spec("constant:1.6,0.2,0"), Error);
  EXPECT_THROW(parse_policy_spec("bogus"), ConfigError);
  EXPECT_THROW(resolve_policy(parse_policy_spec("checkpoint:/no/such.json"), Config{}), ConfigError);
}

}  // namespace
}  // namespace epirl
