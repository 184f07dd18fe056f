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

// Small dense networks with hand-written backpropagation, and Adam.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "epirl/errors.hpp"
#include "epirl/random.hpp"

namespace epirl::nn {

struct Linear {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;  // row-major out x in
  std::vector<double> bias;

  Linear() = default;
  Linear(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weight(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}

  bool operator==(const Linear&) const = default;
};

// Fully connected network: tanh on hidden layers, identity on the output.
class Mlp {
 public:
  struct Cache {
    // activations[0] is the input, activations[k] the output of layer k.
    std::vector<std::vector<double>> activations;
  };

  Mlp() = default;

  Mlp(std::size_t in, const std::vector<std::int64_t>& hidden, std::size_t out) {
    std::size_t prev = in;
    for (auto h : hidden) {
      if (h <= 0) throw ShapeError("hidden layer sizes must be positive");
      layers_.emplace_back(prev, static_cast<std::size_t>(h));
      prev = static_cast<std::size_t>(h);
    }
    layers_.emplace_back(prev, out);
  }

  // Glorot-uniform weights scaled by `gain` (hidden) and `output_gain` (last
  // layer), zero biases.
  void initialize(Rng& rng, double gain = 1.0, double output_gain = 1.0) {
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      auto& l = layers_[k];
      const double g = k + 1 == layers_.size() ? output_gain : gain;
      const double limit = g * std::sqrt(6.0 / static_cast<double>(l.in + l.out));
      for (double& w : l.weight) w = rng.uniform(-limit, limit);
      std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
  }

  std::size_t input_dim() const { return layers_.front().in; }
  std::size_t output_dim() const { return layers_.back().out; }
  const std::vector<Linear>& layers() const { return layers_; }

  std::vector<double> forward(std::span<const double> x) const {
    Cache cache;
    return forward(x, cache);
  }

  std::vector<double> forward(std::span<const double> x, Cache& cache) const {
    if (x.size() != input_dim()) throw ShapeError("network input has the wrong size");
    cache.activations.assign(1, std::vector<double>(x.begin(), x.end()));
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      const auto& l = layers_[k];
      const auto& a = cache.activations.back();
      std::vector<double> z(l.out);
      for (std::size_t o = 0; o < l.out; ++o) {
        double s = l.bias[o];
        const double* w = &l.weight[o * l.in];
        for (std::size_t i = 0; i < l.in; ++i) s += w[i] * a[i];
        z[o] = k + 1 == layers_.size() ? s : std::tanh(s);
      }
      cache.activations.push_back(std::move(z));
    }
    return cache.activations.back();
  }

  // Accumulates d(loss)/d(parameters) into `grad` (same shape as *this) given
  // d(loss)/d(output) for the forward pass recorded in `cache`.
  void backward(const Cache& cache, std::span<const double> d_out, Mlp& grad) const {
    std::vector<double> delta(d_out.begin(), d_out.end());
    for (std::size_t k = layers_.size(); k-- > 0;) {
      const auto& l = layers_[k];
      auto& g = grad.layers_[k];
      const auto& a_in = cache.activations[k];
      const auto& a_out = cache.activations[k + 1];
      if (k + 1 != layers_.size()) {
        for (std::size_t o = 0; o < l.out; ++o) delta[o] *= 1.0 - a_out[o] * a_out[o];
      }
      std::vector<double> d_in(l.in, 0.0);
      for (std::size_t o = 0; o < l.out; ++o) {
        const double d = delta[o];
        g.bias[o] += d;
        double* gw = &g.weight[o * l.in];
        const double* w = &l.weight[o * l.in];
        for (std::size_t i = 0; i < l.in; ++i) {
          gw[i] += d * a_in[i];
          d_in[i] += d * w[i];
        }
      }
      delta = std::move(d_in);
    }
  }

  // Same shape, all zeros.
  Mlp zeros_like() const {
    Mlp z = *this;
    z.fill(0.0);
    return z;
  }

  void fill(double v) {
    for (auto& l : layers_) {
      std::fill(l.weight.begin(), l.weight.end(), v);
      std::fill(l.bias.begin(), l.bias.end(), v);
    }
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
  }

  std::vector<std::span<double>> parameter_spans() {
    std::vector<std::span<double>> s;
    for (auto& l : layers_) {
      s.emplace_back(l.weight);
      s.emplace_back(l.bias);
    }
    return s;
  }

  void append_to(std::vector<double>& flat) const {
    for (const auto& l : layers_) {
      flat.insert(flat.end(), l.weight.begin(), l.weight.end());
      flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
  }

  // Reads parameter_count() values starting at `offset`; returns the new offset.
  std::size_t assign_from(std::span<const double> flat, std::size_t offset) {
    for (auto& l : layers_) {
      for (auto* v : {&l.weight, &l.bias}) {
        if (offset + v->size() > flat.size()) throw ShapeError("flat parameter vector too short");
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), v->size(), v->begin());
        offset += v->size();
      }
    }
    return offset;
  }

  // Layer shapes as (out, in) pairs.
  std::vector<std::vector<std::size_t>> shapes() const {
    std::vector<std::vector<std::size_t>> s;
    for (const auto& l : layers_) s.push_back({l.out, l.in});
    return s;
  }

  bool all_finite() const {
    for (const auto& l : layers_) {
      for (double w : l.weight) if (!std::isfinite(w)) return false;
      for (double b : l.bias) if (!std::isfinite(b)) return false;
    }
    return true;
  }

  bool operator==(const Mlp&) const = default;

 private:
  std::vector<Linear> layers_;
};

inline double global_norm(const std::vector<std::span<double>>& grads) {
  double s = 0.0;
  for (auto g : grads) {
    for (double v : g) s += v * v;
  }
  return std::sqrt(s);
}

// Rescales gradients so their joint L2 norm is at most max_norm. Returns the
// norm before clipping.
inline double clip_global_norm(const std::vector<std::span<double>>& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / (norm + 1e-12);
    for (auto g : grads) {
      for (double& v : g) v *= scale;
    }
  }
  return norm;
}

class Adam {
 public:
  Adam() = default;
  Adam(double lr, double eps = 1e-8, double beta1 = 0.9, double beta2 = 0.999)
      : lr_(lr), eps_(eps), beta1_(beta1), beta2_(beta2) {}

  // params[i] and grads[i] must have matching sizes on every call.
  void step(const std::vector<std::span<double>>& params,
            const std::vector<std::span<double>>& grads) {
    if (params.size() != grads.size()) throw ShapeError("adam: parameter/gradient count mismatch");
    std::size_t total = 0;
    for (auto p : params) total += p.size();
    if (m_.empty()) {
      m_.assign(total, 0.0);
      v_.assign(total, 0.0);
    }
    if (m_.size() != total) throw ShapeError("adam: parameter count changed");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    std::size_t k = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].size() != grads[i].size()) throw ShapeError("adam: span size mismatch");
      for (std::size_t j = 0; j < params[i].size(); ++j, ++k) {
        const double g = grads[i][j];
        m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * g;
        v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * g * g;
        const double m_hat = m_[k] / c1;
        const double v_hat = v_[k] / c2;
        params[i][j] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
      }
    }
  }

  double learning_rate() const { return lr_; }
  std::int64_t steps() const { return t_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

  void restore(std::int64_t t, std::vector<double> m, std::vector<double> v) {
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
  }

 private:
  double lr_ = 1e-3;
  double eps_ = 1e-8;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  std::int64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace epirl::nn
