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

// Proximal policy optimization with generalized advantage estimation.
// Continuous actions use a tanh-squashed diagonal Gaussian with a learned,
// state-independent log standard deviation; discrete actions a softmax.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "epirl/config.hpp"
#include "epirl/errors.hpp"
#include "epirl/nn.hpp"
#include "epirl/random.hpp"
#include "epirl/rl.hpp"

namespace epirl {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// dones[t] marks that the episode ended after step t; `last_value` bootstraps
// the step after the final one when it did not end an episode.
inline GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                             std::span<const bool> dones, double last_value, double gamma,
                             double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw ShapeError("gae: rewards, values and dones must have equal length (" +
                     std::to_string(n) + ", " + std::to_string(values.size()) + ", " +
                     std::to_string(dones.size()) + ")");
  }
  GaeResult r;
  r.advantages.assign(n, 0.0);
  r.returns.assign(n, 0.0);
  double gae = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double next_value = t + 1 == n ? last_value : values[t + 1];
    const double nonterminal = dones[t] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * next_value * nonterminal - values[t];
    gae = delta + gamma * lambda * nonterminal * gae;
    r.advantages[t] = gae;
    r.returns[t] = gae + values[t];
  }
  return r;
}

inline double clipped_surrogate(double ratio, double advantage, double clip) {
  return std::min(ratio * advantage, std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage);
}

// Whether the gradient of the clipped surrogate flows through the ratio.
inline bool surrogate_unclipped(double ratio, double advantage, double clip) {
  return ratio * advantage <= std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage;
}

struct PpoBatch {
  std::vector<std::vector<double>> observations;
  std::vector<std::vector<double>> raw_actions;  // pre-squash sample, or {index}
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return observations.size(); }
};

struct PpoStats {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

struct PolicySample {
  AgentAction action;
  std::vector<double> raw;
  double log_prob = 0.0;  // of `raw` under the unsquashed distribution
  double value = 0.0;
};

class PpoAgent {
 public:
  PpoAgent(std::size_t obs_dim, ActionSpec spec, PpoConfig cfg, std::uint64_t seed)
      : spec_(std::move(spec)), cfg_(std::move(cfg)), rng_(Rng(seed).substream("ppo")) {
    const std::size_t out = discrete() ? spec_.n : spec_.dims();
    if (out == 0) throw ShapeError("ppo: empty action space");
    actor_ = nn::Mlp(obs_dim, cfg_.hidden, out);
    critic_ = nn::Mlp(obs_dim, cfg_.hidden, 1);
    Rng init = Rng(seed).substream("ppo-init");
    actor_.initialize(init, 1.0, 0.01);
    critic_.initialize(init, 1.0, 1.0);
    if (!discrete()) log_std_.assign(out, cfg_.init_log_std);
    optimizer_ = nn::Adam(cfg_.learning_rate, cfg_.adam_eps);
  }

  bool discrete() const { return spec_.kind == ActionSpaceKind::kDiscrete; }
  const ActionSpec& spec() const { return spec_; }
  const PpoConfig& config() const { return cfg_; }
  const nn::Mlp& actor() const { return actor_; }
  const nn::Mlp& critic() const { return critic_; }
  const std::vector<double>& log_std() const { return log_std_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }
  nn::Adam& optimizer() { return optimizer_; }
  const nn::Adam& optimizer() const { return optimizer_; }

  double value(std::span<const double> obs) const { return critic_.forward(obs)[0]; }

  PolicySample sample(std::span<const double> obs) {
    PolicySample s;
    const auto out = actor_.forward(obs);
    s.value = value(obs);
    if (discrete()) {
      const auto p = softmax(out);
      double u = rng_.uniform();
      std::size_t k = 0;
      for (; k + 1 < p.size(); ++k) {
        if (u < p[k]) break;
        u -= p[k];
      }
      s.action = k;
      s.raw = {static_cast<double>(k)};
      s.log_prob = std::log(std::max(p[k], 1e-300));
    } else {
      s.raw.resize(out.size());
      for (std::size_t d = 0; d < out.size(); ++d) {
        s.raw[d] = out[d] + std::exp(log_std_[d]) * rng_.normal();
      }
      s.log_prob = gaussian_log_prob(out, s.raw);
      s.action = squash(s.raw);
    }
    return s;
  }

  // Mode of the policy: argmax for discrete, squashed mean for continuous.
  AgentAction act_deterministic(std::span<const double> obs) const {
    const auto out = actor_.forward(obs);
    if (discrete()) {
      return static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
    }
    return squash(out);
  }

  std::vector<double> squash(std::span<const double> u) const {
    std::vector<double> a(u.size());
    for (std::size_t d = 0; d < u.size(); ++d) {
      a[d] = spec_.low[d] + (spec_.high[d] - spec_.low[d]) * 0.5 * (std::tanh(u[d]) + 1.0);
      a[d] = std::clamp(a[d], spec_.low[d], spec_.high[d]);
    }
    return a;
  }

  // Mean loss over the batch; with `grad` non-null also writes the gradient
  // with respect to parameters() into it.
  PpoStats loss(const PpoBatch& b, std::vector<double>* grad) const {
    const std::size_t m = b.size();
    if (m == 0) throw ShapeError("ppo: empty batch");
    if (b.raw_actions.size() != m || b.old_log_probs.size() != m || b.advantages.size() != m ||
        b.returns.size() != m) {
      throw ShapeError("ppo: batch fields have mismatched lengths");
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    nn::Mlp actor_g = actor_.zeros_like();
    nn::Mlp critic_g = critic_.zeros_like();
    std::vector<double> log_std_g(log_std_.size(), 0.0);
    PpoStats st;
    for (std::size_t i = 0; i < m; ++i) {
      nn::Mlp::Cache ac;
      nn::Mlp::Cache cc;
      const auto out = actor_.forward(b.observations[i], ac);
      const double v = critic_.forward(b.observations[i], cc)[0];

      double log_prob = 0.0;
      double entropy = 0.0;
      std::vector<double> d_out(out.size(), 0.0);  // d logp / d out
      std::vector<double> d_ent_out(out.size(), 0.0);
      if (discrete()) {
        const auto p = softmax(out);
        const auto k = static_cast<std::size_t>(b.raw_actions[i].at(0));
        if (k >= p.size()) throw ShapeError("ppo: discrete action index out of range");
        log_prob = std::log(std::max(p[k], 1e-300));
        for (double pj : p) {
          if (pj > 0.0) entropy -= pj * std::log(pj);
        }
        for (std::size_t j = 0; j < p.size(); ++j) {
          d_out[j] = (j == k ? 1.0 : 0.0) - p[j];
          const double lp = p[j] > 0.0 ? std::log(p[j]) : 0.0;
          d_ent_out[j] = -p[j] * (lp + entropy);
        }
      } else {
        const auto& u = b.raw_actions[i];
        if (u.size() != out.size()) throw ShapeError("ppo: continuous action has the wrong size");
        log_prob = gaussian_log_prob(out, u);
        entropy = gaussian_entropy();
        for (std::size_t d = 0; d < out.size(); ++d) {
          const double var = std::exp(2.0 * log_std_[d]);
          d_out[d] = (u[d] - out[d]) / var;
        }
      }

      const double log_ratio = log_prob - b.old_log_probs[i];
      const double ratio = std::exp(log_ratio);
      const double a = b.advantages[i];
      const double surr = clipped_surrogate(ratio, a, cfg_.clip_range);
      st.policy_loss -= surr * inv_m;
      st.value_loss += (b.returns[i] - v) * (b.returns[i] - v) * inv_m;
      st.entropy += entropy * inv_m;
      st.approx_kl += ((ratio - 1.0) - log_ratio) * inv_m;
      if (std::abs(ratio - 1.0) > cfg_.clip_range) st.clip_fraction += inv_m;

      if (!grad) continue;
      // d loss / d logp from the policy term.
      const double g_logp =
          surrogate_unclipped(ratio, a, cfg_.clip_range) ? -a * ratio * inv_m : 0.0;
      std::vector<double> g_out(out.size());
      for (std::size_t j = 0; j < out.size(); ++j) {
        g_out[j] = g_logp * d_out[j] - cfg_.entropy_coef * inv_m * d_ent_out[j];
      }
      actor_.backward(ac, g_out, actor_g);
      if (!discrete()) {
        const auto& u = b.raw_actions[i];
        for (std::size_t d = 0; d < log_std_.size(); ++d) {
          const double z2 = (u[d] - out[d]) * (u[d] - out[d]) / std::exp(2.0 * log_std_[d]);
          log_std_g[d] += g_logp * (z2 - 1.0) - cfg_.entropy_coef * inv_m;
        }
      }
      const double g_v = cfg_.value_coef * 2.0 * (v - b.returns[i]) * inv_m;
      critic_.backward(cc, std::span<const double>(&g_v, 1), critic_g);
    }
    st.loss = st.policy_loss - cfg_.entropy_coef * st.entropy + cfg_.value_coef * st.value_loss;
    if (grad) {
      grad->clear();
      actor_g.append_to(*grad);
      critic_g.append_to(*grad);
      grad->insert(grad->end(), log_std_g.begin(), log_std_g.end());
    }
    return st;
  }

  // One full update over a rollout: n_epochs passes of shuffled minibatches,
  // advantages normalized per minibatch.
  PpoStats update(const PpoBatch& rollout) {
    const std::size_t n = rollout.size();
    const auto bs = static_cast<std::size_t>(std::max<std::int64_t>(1, cfg_.batch_size));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    PpoStats last;
    std::vector<double> grad;
    for (std::int64_t epoch = 0; epoch < cfg_.n_epochs; ++epoch) {
      rng_.shuffle(idx);
      for (std::size_t start = 0; start < n; start += bs) {
        const std::size_t end = std::min(n, start + bs);
        PpoBatch mb;
        for (std::size_t k = start; k < end; ++k) {
          const std::size_t i = idx[k];
          mb.observations.push_back(rollout.observations[i]);
          mb.raw_actions.push_back(rollout.raw_actions[i]);
          mb.old_log_probs.push_back(rollout.old_log_probs[i]);
          mb.advantages.push_back(rollout.advantages[i]);
          mb.returns.push_back(rollout.returns[i]);
        }
        normalize(mb.advantages);
        last = loss(mb, &grad);
        if (!std::isfinite(last.loss)) throw TrainingError("ppo: non-finite loss");
        apply_gradient(grad);
      }
    }
    return last;
  }

  std::size_t parameter_count() const {
    return actor_.parameter_count() + critic_.parameter_count() + log_std_.size();
  }

  std::vector<double> parameters() const {
    std::vector<double> p;
    actor_.append_to(p);
    critic_.append_to(p);
    p.insert(p.end(), log_std_.begin(), log_std_.end());
    return p;
  }

  void set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count()) {
      throw ShapeError("ppo: expected " + std::to_string(parameter_count()) + " parameters, got " +
                       std::to_string(p.size()));
    }
    std::size_t off = actor_.assign_from(p, 0);
    off = critic_.assign_from(p, off);
    std::copy(p.begin() + static_cast<std::ptrdiff_t>(off), p.end(), log_std_.begin());
  }

  bool parameters_finite() const {
    return actor_.all_finite() && critic_.all_finite() &&
           std::all_of(log_std_.begin(), log_std_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  static std::vector<double> softmax(std::span<const double> logits) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) s += p[j] = std::exp(logits[j] - mx);
    for (double& v : p) v /= s;
    return p;
  }

  static void normalize(std::vector<double>& v) {
    if (v.size() < 2) return;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(v.size() - 1));
    for (double& x : v) x = (x - mean) / (sd + 1e-8);
  }

  double gaussian_log_prob(std::span<const double> mean, std::span<const double> u) const {
    double lp = 0.0;
    for (std::size_t d = 0; d < mean.size(); ++d) {
      const double z = (u[d] - mean[d]) / std::exp(log_std_[d]);
      lp += -0.5 * z * z - log_std_[d] - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    return lp;
  }

  double gaussian_entropy() const {
    double h = 0.0;
    for (double ls : log_std_) h += 0.5 + 0.5 * std::log(2.0 * std::numbers::pi) + ls;
    return h;
  }

  void apply_gradient(std::vector<double>& grad) {
    std::vector<std::span<double>> g{std::span<double>(grad)};
    nn::clip_global_norm(g, cfg_.max_grad_norm);
    std::vector<double> p = parameters();
    optimizer_.step({std::span<double>(p)}, g);
    for (double& ls : std::span<double>(p).last(log_std_.size())) ls = std::clamp(ls, -5.0, 2.0);
    set_parameters(p);
  }

  ActionSpec spec_;
  PpoConfig cfg_;
  Rng rng_;
  nn::Mlp actor_;
  nn::Mlp critic_;
  std::vector<double> log_std_;
  nn::Adam optimizer_;
};

}  // namespace epirl
