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

// Deep Q-learning with a target network and prioritized replay.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "epirl/config.hpp"
#include "epirl/errors.hpp"
#include "epirl/nn.hpp"
#include "epirl/random.hpp"
#include "epirl/replay.hpp"
#include "epirl/rl.hpp"

namespace epirl {

struct DqnStats {
  double loss = 0.0;
  double mean_abs_td = 0.0;
  double beta = 0.0;
  std::int64_t gradient_steps = 0;
  bool target_synced = false;
};

class DqnAgent {
 public:
  DqnAgent(std::size_t obs_dim, const ActionSpec& spec, DqnConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        rng_(Rng(seed).substream("dqn")),
        buffer_(static_cast<std::size_t>(std::max<std::int64_t>(1, cfg_.buffer_size)),
                cfg_.per_alpha, cfg_.priority_floor),
        beta_(cfg_.per_beta) {
    if (spec.kind != ActionSpaceKind::kDiscrete) {
      throw ConfigError("DQN requires a discrete action space");
    }
    if (spec.n == 0) throw ShapeError("dqn: empty action space");
    online_ = nn::Mlp(obs_dim, cfg_.hidden, spec.n);
    Rng init = Rng(seed).substream("dqn-init");
    online_.initialize(init);
    target_ = online_;
    optimizer_ = nn::Adam(cfg_.learning_rate, cfg_.adam_eps);
  }

  const DqnConfig& config() const { return cfg_; }
  const nn::Mlp& online() const { return online_; }
  const nn::Mlp& target() const { return target_; }
  PrioritizedBuffer& buffer() { return buffer_; }
  const PrioritizedBuffer& buffer() const { return buffer_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }
  nn::Adam& optimizer() { return optimizer_; }
  const nn::Adam& optimizer() const { return optimizer_; }
  double beta() const { return beta_; }
  std::int64_t gradient_steps() const { return gradient_steps_; }
  std::size_t n_actions() const { return online_.output_dim(); }

  std::vector<double> q_values(std::span<const double> obs) const { return online_.forward(obs); }

  std::size_t greedy(std::span<const double> obs) const {
    const auto q = q_values(obs);
    return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
  }

  std::size_t act(std::span<const double> obs, double epsilon) {
    if (rng_.uniform() < epsilon) return static_cast<std::size_t>(rng_.below(n_actions()));
    return greedy(obs);
  }

  // Linear decay from epsilon_start to epsilon_end over the first
  // epsilon_fraction of training, then constant.
  double epsilon(double progress) const {
    const double f = cfg_.epsilon_fraction > 0.0 ? std::min(1.0, progress / cfg_.epsilon_fraction) : 1.0;
    return cfg_.epsilon_start + f * (cfg_.epsilon_end - cfg_.epsilon_start);
  }

  void remember(ReplayItem item) { buffer_.add(std::move(item)); }

  bool ready() const { return static_cast<std::int64_t>(buffer_.size()) >= cfg_.learning_starts; }

  // One gradient step on a prioritized minibatch.
  DqnStats update() {
    if (!ready()) {
      throw ProtocolError("dqn update with " + std::to_string(buffer_.size()) +
                          " transitions; learning starts at " +
                          std::to_string(cfg_.learning_starts));
    }
    const auto bs = static_cast<std::size_t>(std::max<std::int64_t>(1, cfg_.batch_size));
    const ReplaySample s = buffer_.sample(bs, beta_, rng_);
    DqnStats st;
    st.beta = beta_;
    beta_ = std::min(1.0, beta_ + cfg_.per_beta_increment);

    nn::Mlp grad = online_.zeros_like();
    std::vector<double> td(bs);
    const double inv_m = 1.0 / static_cast<double>(bs);
    for (std::size_t k = 0; k < bs; ++k) {
      const ReplayItem& it = buffer_.item(s.indices[k]);
      double y = it.reward;
      if (!it.done) {
        const auto qn = target_.forward(it.next_observation);
        y += cfg_.gamma * *std::max_element(qn.begin(), qn.end());
      }
      nn::Mlp::Cache cache;
      const auto q = online_.forward(it.observation, cache);
      td[k] = q.at(it.action) - y;
      st.loss += s.weights[k] * td[k] * td[k] * inv_m;
      st.mean_abs_td += std::abs(td[k]) * inv_m;
      std::vector<double> d_out(q.size(), 0.0);
      d_out[it.action] = 2.0 * s.weights[k] * td[k] * inv_m;
      online_.backward(cache, d_out, grad);
    }
    if (!std::isfinite(st.loss)) throw TrainingError("dqn: non-finite loss");
    auto g = grad.parameter_spans();
    nn::clip_global_norm(g, cfg_.max_grad_norm);
    optimizer_.step(online_.parameter_spans(), g);
    buffer_.update_priorities(s.indices, td);

    ++gradient_steps_;
    if (cfg_.target_update_interval > 0 && gradient_steps_ % cfg_.target_update_interval == 0) {
      sync_target();
      st.target_synced = true;
    }
    st.gradient_steps = gradient_steps_;
    return st;
  }

  // target <- tau * online + (1 - tau) * target
  void sync_target() {
    if (cfg_.tau >= 1.0) {
      target_ = online_;
      return;
    }
    auto t = target_.parameter_spans();
    auto o = online_.parameter_spans();
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t j = 0; j < t[i].size(); ++j) {
        t[i][j] = cfg_.tau * o[i][j] + (1.0 - cfg_.tau) * t[i][j];
      }
    }
  }

  std::vector<double> parameters() const {
    std::vector<double> p;
    online_.append_to(p);
    return p;
  }
  std::vector<double> target_parameters() const {
    std::vector<double> p;
    target_.append_to(p);
    return p;
  }

  void set_parameters(std::span<const double> online, std::span<const double> target) {
    if (online.size() != online_.parameter_count() || target.size() != target_.parameter_count()) {
      throw ShapeError("dqn: parameter count mismatch");
    }
    online_.assign_from(online, 0);
    target_.assign_from(target, 0);
  }

  void restore_counters(double beta, std::int64_t gradient_steps) {
    beta_ = beta;
    gradient_steps_ = gradient_steps;
  }

  bool parameters_finite() const { return online_.all_finite() && target_.all_finite(); }

 private:
  DqnConfig cfg_;
  Rng rng_;
  nn::Mlp online_;
  nn::Mlp target_;
  nn::Adam optimizer_;
  PrioritizedBuffer buffer_;
  double beta_;
  std::int64_t gradient_steps_ = 0;
};

}  // namespace epirl
