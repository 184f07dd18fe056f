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

// Policy specifications shared by the command-line workflows:
//   none | schedule:<7w7l|uk-approx|file> | checkpoint:<file> | constant:<b>,<tp>,<ctp>

#include <cctype>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "epirl/baselines.hpp"
#include "epirl/config.hpp"
#include "epirl/csv.hpp"
#include "epirl/errors.hpp"
#include "epirl/training.hpp"

namespace epirl {

struct PolicySpec {
  enum class Kind { kNone, kSchedule, kCheckpoint, kConstant };
  Kind kind = Kind::kNone;
  std::string text;  // as given
  std::string arg;
  Action constant;
};

inline PolicySpec parse_policy_spec(const std::string& text) {
  PolicySpec s;
  s.text = text;
  if (text == "none") return s;
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon + 1 == text.size()) {
    throw ConfigError("invalid policy '" + text +
                      "' (expected none, schedule:<name|file>, checkpoint:<file> or constant:b,tp,ctp)");
  }
  const std::string head = text.substr(0, colon);
  s.arg = text.substr(colon + 1);
  if (head == "schedule") {
    s.kind = PolicySpec::Kind::kSchedule;
  } else if (head == "checkpoint") {
    s.kind = PolicySpec::Kind::kCheckpoint;
  } else if (head == "constant") {
    s.kind = PolicySpec::Kind::kConstant;
    const auto parts = csv::split(s.arg);
    if (parts.size() != 3) throw ConfigError("constant policy needs three values: " + text);
    s.constant = {csv::to_double(parts[0], text), csv::to_double(parts[1], text),
                  csv::to_double(parts[2], text)};
    validate_simulator_action(s.constant);
  } else {
    throw ConfigError("unknown policy kind '" + head + "' in '" + text + "'");
  }
  return s;
}

// File-system-safe label, e.g. "schedule_7w7l".
inline std::string policy_label(const PolicySpec& s) {
  std::string base;
  switch (s.kind) {
    case PolicySpec::Kind::kNone: return "none";
    case PolicySpec::Kind::kSchedule: base = "schedule_" + std::filesystem::path(s.arg).stem().string(); break;
    case PolicySpec::Kind::kCheckpoint: base = "checkpoint_" + std::filesystem::path(s.arg).stem().string(); break;
    case PolicySpec::Kind::kConstant: base = "constant_" + s.arg; break;
  }
  for (char& c : base) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') c = '_';
  }
  return base;
}

// A policy ready to run, with the config its episodes use. Checkpoint
// policies run in the action space they were trained in.
struct ResolvedPolicy {
  PolicySpec spec;
  std::string label;
  Config config;
  EvalPolicy policy;
  std::shared_ptr<Trainer> agent;  // checkpoint policies only
};

inline ResolvedPolicy resolve_policy(const PolicySpec& spec, const Config& cfg) {
  ResolvedPolicy r{spec, policy_label(spec), cfg, {}, nullptr};
  switch (spec.kind) {
    case PolicySpec::Kind::kNone:
      r.policy = schedule_eval_policy(r.label, SchedulePolicy());
      break;
    case PolicySpec::Kind::kSchedule:
      r.policy = schedule_eval_policy(r.label, schedule_by_name(spec.arg));
      break;
    case PolicySpec::Kind::kConstant:
      r.policy = schedule_eval_policy(r.label, constant_policy(spec.constant));
      break;
    case PolicySpec::Kind::kCheckpoint: {
      if (!std::filesystem::is_regular_file(spec.arg)) {
        throw ConfigError("checkpoint file '" + spec.arg + "' not found");
      }
      json ckpt;
      try {
        ckpt = read_checkpoint(spec.arg);
      } catch (const std::exception& e) {
        throw ConfigError("cannot load checkpoint '" + spec.arg + "': " + e.what());
      }
      const Config trained = config_from_json(ckpt.at("config"));
      r.config.env.action_space_kind = trained.env.action_space_kind;
      r.config.env.observe_diagnoses = trained.env.observe_diagnoses;
      r.config.env.observation_normalization = trained.env.observation_normalization;
      r.agent = std::make_shared<Trainer>(load_trainer(ckpt, epidemic_env_factory(trained)));
      std::string stem = std::filesystem::path(spec.arg).stem().string();
      if (stem.rfind("checkpoint_", 0) == 0) stem = stem.substr(11);
      r.label = to_string(r.agent->kind()) + "_" + stem;
      r.policy = agent_eval_policy(r.label, r.agent->policy());
      break;
    }
  }
  return r;
}

}  // namespace epirl
