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

// Proportional prioritized experience replay over a sum tree.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epirl/errors.hpp"
#include "epirl/random.hpp"

namespace epirl {

class SumTree {
 public:
  explicit SumTree(std::size_t capacity = 1) : capacity_(std::max<std::size_t>(1, capacity)) {
    leaves_ = 1;
    while (leaves_ < capacity_) leaves_ <<= 1;
    tree_.assign(2 * leaves_, 0.0);
  }

  std::size_t capacity() const { return capacity_; }
  double total() const { return tree_[1]; }
  double get(std::size_t i) const { return tree_[leaves_ + i]; }

  void set(std::size_t i, double value) {
    if (i >= capacity_) throw ShapeError("sum tree index out of range");
    if (!(value >= 0.0) || !std::isfinite(value)) throw ShapeError("sum tree values must be finite and >= 0");
    std::size_t k = leaves_ + i;
    tree_[k] = value;
    for (k >>= 1; k >= 1; k >>= 1) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
  }

  // Smallest index whose prefix sum exceeds `mass`, mass in [0, total()).
  std::size_t find(double mass) const {
    std::size_t k = 1;
    while (k < leaves_) {
      if (mass < tree_[2 * k] || tree_[2 * k + 1] <= 0.0) {
        k = 2 * k;
      } else {
        mass -= tree_[2 * k];
        k = 2 * k + 1;
      }
    }
    return std::min(k - leaves_, capacity_ - 1);
  }

 private:
  std::size_t capacity_;
  std::size_t leaves_;
  std::vector<double> tree_;
};

struct ReplayItem {
  std::vector<double> observation;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_observation;
  bool done = false;

  bool operator==(const ReplayItem&) const = default;
};

struct ReplaySample {
  std::vector<std::size_t> indices;
  std::vector<double> weights;  // importance weights, max-normalized
  std::vector<double> probabilities;
};

// Ring buffer. Items are drawn with probability p_i^alpha / sum_j p_j^alpha,
// new items enter at the running maximum priority.
class PrioritizedBuffer {
 public:
  PrioritizedBuffer(std::size_t capacity, double alpha, double priority_floor = 1e-3)
      : tree_(capacity), items_(), alpha_(alpha), floor_(priority_floor) {
    if (capacity == 0) throw ShapeError("replay capacity must be positive");
    items_.reserve(capacity);
    priorities_.assign(capacity, 0.0);
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return tree_.capacity(); }
  double alpha() const { return alpha_; }
  double max_priority() const { return max_priority_; }
  std::size_t next_index() const { return next_; }
  const ReplayItem& item(std::size_t i) const { return items_.at(i); }
  double priority(std::size_t i) const { return priorities_.at(i); }
  double probability(std::size_t i) const { return tree_.get(i) / tree_.total(); }

  void add(ReplayItem item) {
    if (items_.size() < capacity()) {
      items_.push_back(std::move(item));
    } else {
      items_[next_] = std::move(item);
    }
    set_priority(next_, max_priority_);
    next_ = (next_ + 1) % capacity();
  }

  // Independent draws with replacement.
  ReplaySample sample(std::size_t batch, double beta, Rng& rng) const {
    if (items_.empty()) throw ProtocolError("sampling from an empty replay buffer");
    ReplaySample s;
    const double total = tree_.total();
    const double n = static_cast<double>(items_.size());
    for (std::size_t k = 0; k < batch; ++k) {
      const std::size_t i = tree_.find(rng.uniform() * total);
      const double p = tree_.get(i) / total;
      s.indices.push_back(i);
      s.probabilities.push_back(p);
      s.weights.push_back(std::pow(n * p, -beta));
    }
    const double mx = *std::max_element(s.weights.begin(), s.weights.end());
    for (double& w : s.weights) w /= mx;
    return s;
  }

  // priority = |td| + floor
  void update_priorities(std::span<const std::size_t> indices, std::span<const double> td_errors) {
    if (indices.size() != td_errors.size()) throw ShapeError("priority update size mismatch");
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (indices[k] >= items_.size()) throw ShapeError("priority update index out of range");
      const double p = std::abs(td_errors[k]) + floor_;
      set_priority(indices[k], p);
      max_priority_ = std::max(max_priority_, p);
    }
  }

  void restore(std::vector<ReplayItem> items, std::vector<double> priorities, std::size_t next,
               double max_priority) {
    if (items.size() > capacity() || priorities.size() != items.size()) {
      throw ShapeError("replay restore: inconsistent sizes");
    }
    items_ = std::move(items);
    priorities_.assign(capacity(), 0.0);
    tree_ = SumTree(capacity());
    for (std::size_t i = 0; i < items_.size(); ++i) set_priority(i, priorities[i]);
    next_ = next % capacity();
    max_priority_ = max_priority;
  }

  std::vector<double> stored_priorities() const {
    return {priorities_.begin(), priorities_.begin() + static_cast<std::ptrdiff_t>(items_.size())};
  }
  const std::vector<ReplayItem>& items() const { return items_; }

 private:
  void set_priority(std::size_t i, double p) {
    priorities_[i] = p;
    tree_.set(i, std::pow(p, alpha_));
  }

  SumTree tree_;
  std::vector<ReplayItem> items_;
  std::vector<double> priorities_;
  double alpha_;
  double floor_;
  double max_priority_ = 1.0;
  std::size_t next_ = 0;
};

}  // namespace epirl
