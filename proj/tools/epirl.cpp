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

// epirl: simulate, calibrate, train, evaluate and compare from the shell.
//
// Exit status: 0 on success, 1 on a runtime failure, 2 on a usage error. A
// usage error removes any output directory this invocation created.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epirl.hpp"

namespace fs = std::filesystem;
using epirl::json;

namespace {

constexpr const char* kConfigPathVar = "EPIRL_CONFIG_PATH";
constexpr const char* kDefaultConfigName = "epirl.json";

struct UsageError : epirl::Error {
  using Error::Error;
};

struct CommonOptions {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> sets;
  bool verbose = false;
};

std::vector<fs::path> config_search_path() {
  std::vector<fs::path> dirs;
  const char* env = std::getenv(kConfigPathVar);
  if (!env) return dirs;
  std::string s(env);
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto colon = s.find(':', start);
    const std::string part = s.substr(start, colon == std::string::npos ? colon : colon - start);
    if (!part.empty()) dirs.emplace_back(part);
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  return dirs;
}

// An explicit path wins; relative paths that do not exist are looked up in
// EPIRL_CONFIG_PATH. Without --config, the first epirl.json on that path is
// used, else the built-in defaults.
std::string resolve_config_path(const std::string& given) {
  const auto dirs = config_search_path();
  if (given.empty()) {
    for (const auto& d : dirs) {
      if (fs::is_regular_file(d / kDefaultConfigName)) return (d / kDefaultConfigName).string();
    }
    return {};
  }
  if (fs::exists(given)) return given;
  if (fs::path(given).is_relative()) {
    for (const auto& d : dirs) {
      if (fs::is_regular_file(d / given)) return (d / given).string();
    }
  }
  throw UsageError("config file '" + given + "' not found");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : epirl::csv::split(text)) {
    const auto dots = part.find("..");
    try {
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(part));
        continue;
      }
      const auto lo = std::stoull(part.substr(0, dots));
      const auto hi = std::stoull(part.substr(dots + 2));
      if (hi < lo) throw UsageError("empty seed range '" + part + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } catch (const std::logic_error&) {
      throw UsageError("invalid seed list '" + text + "' (use e.g. 1..10 or 1,4,9)");
    }
  }
  if (seeds.empty()) throw UsageError("empty seed list");
  return seeds;
}

// Owns the output directory of one invocation.
class OutputDir {
 public:
  explicit OutputDir(fs::path p) : path_(std::move(p)) {}

  void create() {
    created_ = !fs::exists(path_);
    fs::create_directories(path_);
  }

  void discard() noexcept {
    std::error_code ec;
    if (created_) fs::remove_all(path_, ec);
  }

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
  bool created_ = false;
};

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw epirl::Error("cannot write " + p.string());
  return os;
}

void write_json(const fs::path& p, const json& j) { open_out(p) << j.dump(2) << '\n'; }

// Day-level trace: counts, the applied action and that day's economic loss.
void write_daily_csv(const fs::path& p, const epirl::EpisodeMetrics& m) {
  auto os = open_out(p);
  os << std::setprecision(12);
  for (std::size_t i = 0; i < epirl::DailyCounts::kColumns.size(); ++i) {
    os << (i ? "," : "") << epirl::DailyCounts::kColumns[i];
  }
  os << ",ch_beta,ch_tp,ch_ctp,economic_loss\n";
  for (std::size_t d = 0; d < m.series.size(); ++d) {
    for (const auto v : m.series[d].values()) os << v << ',';
    const auto& a = m.daily_actions.at(d);
    os << a.ch_beta << ',' << a.ch_tp << ',' << a.ch_ctp << ',' << m.daily_loss.at(d) << '\n';
  }
}

json metrics_json(const epirl::EpisodeMetrics& m) {
  return {{"seed", m.seed},
          {"total_return", m.total_return},
          {"cumulative_infections", m.cumulative_infections},
          {"deaths", m.deaths},
          {"economic_loss_pct", m.economic_loss_pct},
          {"rt_cross_day", m.rt_cross_day ? json(*m.rt_cross_day) : json(nullptr)}};
}

json mean_sd_json(const epirl::MeanSd& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

json row_json(const epirl::ComparisonRow& r) {
  return {{"strategy", r.name},
          {"episodes", r.n},
          {"cumulative_infections", mean_sd_json(r.infections)},
          {"deaths", mean_sd_json(r.deaths)},
          {"economic_loss_pct", mean_sd_json(r.economic_loss_pct)},
          {"total_return", mean_sd_json(r.total_return)},
          {"rt_cross_day", mean_sd_json(r.rt_cross_day)},
          {"episodes_crossed", r.n_crossed}};
}

// Everything a command needs before it touches the file system.
struct Prepared {
  epirl::Config config;
  std::string config_path;
  epirl::RunManifest manifest;
};

Prepared prepare(const std::string& command, const CommonOptions& o, const json& argv) {
  Prepared p;
  p.config_path = resolve_config_path(o.config);
  p.config = epirl::load_config(p.config_path, o.sets);
  p.manifest.command = command;
  p.manifest.out_dir = o.out;
  p.manifest.arguments = {{"argv", argv}, {"cwd", fs::current_path().string()}};
  if (!p.config_path.empty()) p.manifest.add_input("config", p.config_path);
  return p;
}

void finish_manifest(Prepared& p) { p.manifest.config = p.config; }

void add_policy_inputs(epirl::RunManifest& m, const epirl::PolicySpec& s) {
  const bool file = s.kind == epirl::PolicySpec::Kind::kCheckpoint ||
                    (s.kind == epirl::PolicySpec::Kind::kSchedule && s.arg != "7w7l" &&
                     s.arg != "uk-approx" && s.arg != "none");
  if (file) m.add_input("policy:" + s.text, s.arg);
}

epirl::ResolvedPolicy resolve_or_usage(const std::string& text, const epirl::Config& cfg) {
  try {
    return epirl::resolve_policy(epirl::parse_policy_spec(text), cfg);
  } catch (const epirl::ConfigError& e) {
    throw UsageError(e.what());
  } catch (const epirl::ParseError& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string policy = "none";
};

void cmd_simulate(const CommonOptions& o, const SimulateOptions& so, const json& argv,
                  OutputDir& out) {
  Prepared p = prepare("simulate", o, argv);
  const auto policy = resolve_or_usage(so.policy, p.config);
  p.config = policy.config;
  finish_manifest(p);
  p.manifest.seeds = {o.seed};
  add_policy_inputs(p.manifest, policy.spec);
  p.manifest.arguments["policy"] = so.policy;

  out.create();
  p.manifest.write(out.path());
  auto trace = open_out(out / "trace.jsonl");
  const auto m = epirl::run_episode(policy.policy, p.config, o.seed, &trace);
  write_daily_csv(out / "daily.csv", m);
  {
    auto os = open_out(out / "rt.csv");
    epirl::write_rt_csv(os, m.rt);
  }
  {
    const auto start = epirl::parse_date(p.config.calibration.start_date, "calibration.start_date");
    auto os = open_out(out / "observed.csv");
    epirl::write_observed_csv(
        os, epirl::observed_from_series(epirl::scale_series(m.series, p.config.population.pop_scale()),
                                        start));
  }
  json summary = metrics_json(m);
  summary["policy"] = so.policy;
  summary["manifest"] = "manifest.json";
  summary["days"] = m.series.size();
  write_json(out / "summary.json", summary);
  std::cout << "infections " << m.cumulative_infections << ", deaths " << m.deaths
            << ", economic loss " << std::fixed << std::setprecision(2) << m.economic_loss_pct
            << "%\n";
}

struct CalibrateOptions {
  std::string data;
  std::optional<std::int64_t> trials;
  bool pure_random = false;
};

void cmd_calibrate(const CommonOptions& o, const CalibrateOptions& co, const json& argv,
                   OutputDir& out) {
  Prepared p = prepare("calibrate", o, argv);
  if (co.trials) {
    if (*co.trials < 1) throw UsageError("--trials must be >= 1");
    p.config.calibration.trials = *co.trials;
  }
  epirl::CalibrationSpec spec;
  try {
    spec.observed = epirl::read_observed(co.data);
    spec.schedule = epirl::schedule_by_name(p.config.calibration.schedule);
    epirl::parse_date(p.config.calibration.start_date, "calibration.start_date");
  } catch (const epirl::Error& e) {
    throw UsageError(e.what());
  }
  spec.base = p.config;
  spec.seed = o.seed;
  spec.pure_random = co.pure_random;
  finish_manifest(p);
  p.manifest.seeds = {o.seed};
  p.manifest.add_input("data", co.data);
  p.manifest.arguments["pure_random"] = co.pure_random;

  out.create();
  p.manifest.write(out.path());
  epirl::CalibrationResult res;
  try {
    res = epirl::search(spec);
  } catch (const epirl::AlignmentError& e) {
    throw UsageError(e.what());
  }
  {
    auto os = open_out(out / "trials.csv");
    epirl::write_trial_log_csv(os, res);
  }
  write_json(out / "best_params.json", epirl::best_params_overlay(res));
  {
    const auto cfg = epirl::with_parameters(p.config, res.pop_infected, res.beta_initial);
    const auto fit = epirl::mean_series(epirl::simulate_replications(
        cfg, spec.schedule, spec.seed, p.config.calibration.replications));
    auto os = open_out(out / "fit.csv");
    epirl::write_fit_csv(os, fit, spec.observed,
                         epirl::parse_date(p.config.calibration.start_date));
  }
  write_json(out / "summary.json", {{"pop_infected", res.pop_infected},
                                    {"beta_initial", res.beta_initial},
                                    {"loss", res.loss},
                                    {"best_trial", res.best_trial},
                                    {"trials", res.trials.size()},
                                    {"manifest", "manifest.json"}});
  std::cout << std::setprecision(6) << "beta_initial " << res.beta_initial << ", pop_infected "
            << res.pop_infected << ", loss " << res.loss << '\n';
}

struct TrainOptionsCli {
  std::string agent;
  std::string space;
  std::int64_t episodes = 300;
  std::string resume;
};

void cmd_train(const CommonOptions& o, const TrainOptionsCli& to, const json& argv, OutputDir& out) {
  Prepared p = prepare("train", o, argv);
  std::optional<json> resume;
  epirl::AgentKind kind = epirl::AgentKind::kPpo;
  std::uint64_t seed = o.seed;
  if (to.episodes < 0) throw UsageError("--episodes must be >= 0");
  if (!to.resume.empty()) {
    try {
      resume = epirl::read_checkpoint(to.resume);
      p.config = epirl::config_from_json(resume->at("config"));
      kind = epirl::parse_agent_kind(resume->at("agent").get<std::string>());
      seed = resume->at("seed").get<std::uint64_t>();
    } catch (const std::exception& e) {
      throw UsageError("cannot resume from '" + to.resume + "': " + e.what());
    }
    if (!to.agent.empty() && to.agent != epirl::to_string(kind)) {
      throw UsageError("--agent " + to.agent + " does not match the checkpoint's " +
                       epirl::to_string(kind) + " agent");
    }
    p.manifest.add_input("resume", to.resume);
  } else {
    try {
      kind = epirl::parse_agent_kind(to.agent.empty() ? "ppo" : to.agent);
    } catch (const epirl::Error& e) {
      throw UsageError(e.what());
    }
    std::string space = to.space;
    if (space.empty() && kind == epirl::AgentKind::kDqn) space = "discrete";
    if (!space.empty()) {
      if (space != "continuous" && space != "discrete") {
        throw UsageError("--space must be continuous or discrete");
      }
      p.config.env.action_space_kind = space;
    }
    if (kind == epirl::AgentKind::kDqn && p.config.env.action_space_kind != "discrete") {
      throw UsageError("dqn requires --space discrete");
    }
  }
  finish_manifest(p);
  p.manifest.seeds = {seed};
  p.manifest.arguments["agent"] = epirl::to_string(kind);
  p.manifest.arguments["episodes"] = to.episodes;

  out.create();
  p.manifest.write(out.path());
  epirl::TrainOptions opt;
  opt.total_episodes = to.episodes;
  opt.seed = seed;
  opt.checkpoint_interval = p.config.training.checkpoint_interval;
  opt.checkpoint_dir = out / "checkpoints";
  opt.resume = resume;
  opt.on_episode = [](std::int64_t ep, double ret) {
    if ((ep + 1) % 10 == 0) {
      epirl::log::info("episode " + std::to_string(ep + 1) + " return " + std::to_string(ret));
    }
  };
  const auto trainer = epirl::train(epirl::epidemic_env_factory(p.config), kind, p.config, opt);
  {
    auto os = open_out(out / "curve.csv");
    epirl::write_curve_csv(os, trainer.curve());
  }
  const auto& c = trainer.curve();
  const std::size_t w = std::min<std::size_t>(50, c.size());
  auto mean = [](auto b, auto e) {
    double s = 0.0;
    for (auto it = b; it != e; ++it) s += *it;
    return b == e ? 0.0 : s / static_cast<double>(e - b);
  };
  write_json(out / "summary.json",
             {{"agent", epirl::to_string(kind)},
              {"action_space", p.config.env.action_space_kind},
              {"episodes", c.size()},
              {"leading_mean_return", mean(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(w))},
              {"trailing_mean_return", mean(c.end() - static_cast<std::ptrdiff_t>(w), c.end())},
              {"checkpoint", "checkpoints/checkpoint_final.json"},
              {"manifest", "manifest.json"}});
  std::cout << "trained " << c.size() << " episodes; final checkpoint "
            << (out / "checkpoints" / "checkpoint_final.json").string() << '\n';
}

struct EvalOptions {
  std::vector<std::string> policies;
  std::string seeds;
  std::int64_t episodes = 10;
};

std::vector<std::uint64_t> eval_seeds(const CommonOptions& o, const EvalOptions& eo) {
  if (!eo.seeds.empty()) return parse_seed_list(eo.seeds);
  if (eo.episodes < 1) throw UsageError("--episodes must be >= 1");
  std::vector<std::uint64_t> s;
  for (std::int64_t i = 0; i < eo.episodes; ++i) s.push_back(o.seed + static_cast<std::uint64_t>(i));
  return s;
}

void write_episode_files(const fs::path& dir, const epirl::EpisodeMetrics& m) {
  const std::string tag = "seed" + std::to_string(m.seed);
  write_daily_csv(dir / ("daily_" + tag + ".csv"), m);
  auto os = open_out(dir / ("rt_" + tag + ".csv"));
  epirl::write_rt_csv(os, m.rt);
}

void cmd_evaluate(const CommonOptions& o, const EvalOptions& eo, const json& argv, OutputDir& out) {
  Prepared p = prepare("evaluate", o, argv);
  if (eo.policies.size() != 1) throw UsageError("evaluate takes exactly one --policy");
  const auto policy = resolve_or_usage(eo.policies.front(), p.config);
  const auto seeds = eval_seeds(o, eo);
  p.config = policy.config;
  finish_manifest(p);
  p.manifest.seeds = seeds;
  add_policy_inputs(p.manifest, policy.spec);
  p.manifest.arguments["policy"] = eo.policies.front();

  out.create();
  p.manifest.write(out.path());
  const auto s = epirl::evaluate(policy.policy, p.config, seeds);
  {
    auto os = open_out(out / "episodes.csv");
    os << std::setprecision(12)
       << "seed,total_return,cumulative_infections,deaths,economic_loss_pct,rt_cross_day\n";
    for (const auto& m : s.episodes) {
      os << m.seed << ',' << m.total_return << ',' << m.cumulative_infections << ',' << m.deaths
         << ',' << m.economic_loss_pct << ',';
      if (m.rt_cross_day) os << *m.rt_cross_day;
      os << '\n';
    }
  }
  for (const auto& m : s.episodes) write_episode_files(out / "episodes", m);
  const auto row = epirl::summarize(s);
  json summary = row_json(row);
  summary["policy"] = eo.policies.front();
  summary["seeds"] = seeds;
  summary["manifest"] = "manifest.json";
  write_json(out / "summary.json", summary);
  std::cout << std::fixed << std::setprecision(2) << policy.label << ": infections "
            << row.infections.mean << " +/- " << row.infections.sd << ", economic loss "
            << row.economic_loss_pct.mean << "%, return " << row.total_return.mean << '\n';
}

void cmd_compare(const CommonOptions& o, const EvalOptions& eo, const json& argv, OutputDir& out) {
  Prepared p = prepare("compare", o, argv);
  if (eo.policies.size() < 2) throw UsageError("compare needs at least two --policy options");
  std::vector<epirl::ResolvedPolicy> policies;
  for (const auto& text : eo.policies) {
    auto r = resolve_or_usage(text, p.config);
    std::string label = r.label;
    for (int k = 2; std::any_of(policies.begin(), policies.end(),
                                [&](const auto& q) { return q.label == label; });
         ++k) {
      label = r.label + "_" + std::to_string(k);
    }
    r.label = label;
    r.policy.name = label;
    add_policy_inputs(p.manifest, r.spec);
    policies.push_back(std::move(r));
  }
  const auto seeds = eval_seeds(o, eo);
  finish_manifest(p);
  p.manifest.seeds = seeds;
  p.manifest.arguments["policies"] = eo.policies;

  out.create();
  p.manifest.write(out.path());
  std::vector<epirl::StrategyMetrics> results;
  for (const auto& r : policies) {
    results.push_back(epirl::evaluate(r.policy, r.config, seeds));
    for (const auto& m : results.back().episodes) write_episode_files(out / r.label, m);
  }
  const auto report = epirl::compare_strategies(results);
  {
    auto os = open_out(out / "report.csv");
    epirl::write_report_csv(os, report);
  }
  std::ostringstream text;
  epirl::write_report_text(text, report);
  open_out(out / "report.txt") << text.str();
  std::cout << text.str();
}

}  // namespace

int run(int argc, char** argv);

namespace {

// Re-executes the command line recorded in a manifest, from its working
// directory.
int cmd_replay(const std::string& manifest_path) {
  json m;
  try {
    m = epirl::read_json_file(manifest_path);
    const auto args = m.at("arguments").at("argv").get<std::vector<std::string>>();
    fs::current_path(m.at("arguments").at("cwd").get<std::string>());
    std::vector<std::string> storage{"epirl"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> ptrs;
    for (auto& s : storage) ptrs.push_back(s.data());
    return run(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const std::exception& e) {
    std::cerr << "epirl: cannot replay '" << manifest_path << "': " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Agent-based epidemic simulation and intervention-policy learning"};
  app.set_version_flag("--version", std::string(epirl::kVersion));
  app.require_subcommand(1);

  CommonOptions common;
  SimulateOptions sim;
  CalibrateOptions cal;
  TrainOptionsCli tr;
  EvalOptions ev;
  std::string replay_path;
  std::int64_t trials = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config,
                    std::string("Config file (default: epirl.json on $") + kConfigPathVar + ")");
    sub->add_option("--seed", common.seed, "Master seed")->capture_default_str();
    sub->add_option("--out", common.out, "Output directory (default runs/<command>)");
    sub->add_option("--set", common.sets, "Override a config value, e.g. rewards.kappa=50");
    sub->add_flag("-v,--verbose", common.verbose, "Log progress to stderr");
  };

  auto* s_sim = app.add_subcommand("simulate", "Run one episode under a policy");
  s_sim->add_option("--policy", sim.policy,
                    "none | schedule:<7w7l|uk-approx|file> | checkpoint:<file> | constant:b,tp,ctp")
      ->capture_default_str();

  auto* s_cal = app.add_subcommand("calibrate", "Fit pop_infected and beta_initial to observed data");
  s_cal->add_option("--data", cal.data, "Observed CSV (date,cum_confirmed,cum_deaths)")->required();
  s_cal->add_option("--trials", trials, "Number of trials (overrides calibration.trials)");
  s_cal->add_flag("--pure-random", cal.pure_random, "Uniform random search only");

  auto* s_tr = app.add_subcommand("train", "Train a PPO or DQN agent");
  s_tr->add_option("--agent", tr.agent, "ppo | dqn (default ppo)");
  s_tr->add_option("--space", tr.space, "continuous | discrete");
  s_tr->add_option("--episodes", tr.episodes, "Total training episodes")->capture_default_str();
  s_tr->add_option("--resume", tr.resume, "Continue from a checkpoint");

  auto* s_ev = app.add_subcommand("evaluate", "Evaluate one policy over a seed set");
  auto* s_cmp = app.add_subcommand("compare", "Compare policies on a common seed set");
  for (auto* s : {s_ev, s_cmp}) {
    s->add_option("--policy", ev.policies, "Policy spec (repeatable for compare)")->required();
    s->add_option("--seeds", ev.seeds, "Seed list, e.g. 1..10 or 3,5,8");
    s->add_option("--episodes", ev.episodes, "Number of seeds from --seed when --seeds is absent")
        ->capture_default_str();
  }

  auto* s_rep = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
  s_rep->add_option("manifest", replay_path, "manifest.json")->required();

  // Common flags share one struct; only one subcommand runs per invocation.
  for (auto* s : {s_sim, s_cal, s_tr, s_ev, s_cmp}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (s_rep->parsed()) return cmd_replay(replay_path);
  for (auto* s : {s_sim, s_cal, s_tr, s_ev, s_cmp}) {
    if (s->parsed() && common.out.empty()) common.out = "runs/" + s->get_name();
  }
  if (s_cal->get_option("--trials")->count() > 0) cal.trials = trials;
  if (common.verbose) epirl::log::set_level(epirl::log::Level::kInfo);

  json args = json::array();
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);

  OutputDir out(common.out);
  try {
    if (s_sim->parsed()) cmd_simulate(common, sim, args, out);
    if (s_cal->parsed()) cmd_calibrate(common, cal, args, out);
    if (s_tr->parsed()) cmd_train(common, tr, args, out);
    if (s_ev->parsed()) cmd_evaluate(common, ev, args, out);
    if (s_cmp->parsed()) cmd_compare(common, ev, args, out);
  } catch (const UsageError& e) {
    out.discard();
    std::cerr << "epirl: " << e.what() << '\n';
    return 2;
  } catch (const epirl::ConfigError& e) {
    out.discard();
    std::cerr << "epirl: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "epirl: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int main(int argc, char** argv) { return run(argc, argv); }
