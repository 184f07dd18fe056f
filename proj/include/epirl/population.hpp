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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "epirl/config.hpp"
#include "epirl/logging.hpp"
#include "epirl/random.hpp"
#include "epirl/types.hpp"

namespace epirl {

// Undirected contact graph over agents in compressed-row form. Neighbor lists
// are sorted and free of duplicates and self-loops.
class ContactLayer {
 public:
  ContactLayer() = default;

  ContactLayer(std::size_t n_agents, std::vector<std::pair<AgentId, AgentId>> edges) {
    std::vector<std::uint32_t> degree(n_agents, 0);
    for (auto& [a, b] : edges) {
      if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
    for (const auto& [a, b] : edges) {
      ++degree[a];
      ++degree[b];
    }
    offsets_.assign(n_agents + 1, 0);
    for (std::size_t i = 0; i < n_agents; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    neighbors_.resize(offsets_.back());
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [a, b] : edges) {
      neighbors_[cursor[a]++] = b;
      neighbors_[cursor[b]++] = a;
    }
    for (std::size_t i = 0; i < n_agents; ++i) {
      std::sort(neighbors_.begin() + offsets_[i], neighbors_.begin() + offsets_[i + 1]);
    }
  }

  // Linear-time build that keeps pairs in generation order and does not
  // merge duplicates. Self-loops are dropped.
  static ContactLayer from_pairs_unsorted(std::size_t n_agents,
                                          const std::vector<std::pair<AgentId, AgentId>>& edges) {
    ContactLayer layer;
    layer.offsets_.assign(n_agents + 1, 0);
    for (const auto& [a, b] : edges) {
      if (a == b) continue;
      ++layer.offsets_[a + 1];
      ++layer.offsets_[b + 1];
    }
    for (std::size_t i = 0; i < n_agents; ++i) layer.offsets_[i + 1] += layer.offsets_[i];
    layer.neighbors_.resize(layer.offsets_.back());
    std::vector<std::uint32_t> cursor(layer.offsets_.begin(), layer.offsets_.end() - 1);
    for (const auto& [a, b] : edges) {
      if (a == b) continue;
      layer.neighbors_[cursor[a]++] = b;
      layer.neighbors_[cursor[b]++] = a;
    }
    return layer;
  }

  std::span<const AgentId> neighbors(AgentId id) const {
    if (offsets_.empty()) return {};
    return {neighbors_.data() + offsets_[id], offsets_[id + 1] - offsets_[id]};
  }

  std::size_t n_agents() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t n_edges() const { return neighbors_.size() / 2; }

  double mean_degree() const {
    return n_agents() ? static_cast<double>(neighbors_.size()) / static_cast<double>(n_agents())
                      : 0.0;
  }

  bool operator==(const ContactLayer&) const = default;

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<AgentId> neighbors_;
};

enum class Layer : std::uint8_t { kHousehold, kSchool, kWork, kCommunity };

struct Population {
  std::vector<Agent> agents;
  ContactLayer household;
  ContactLayer school;
  ContactLayer work;
  std::size_t n_households = 0;
  std::size_t n_schools = 0;
  std::size_t n_workplaces = 0;

  std::size_t size() const { return agents.size(); }
};

namespace detail {

inline double sample_age(const AgeTable& pyramid, Rng& rng) {
  double total = 0.0;
  for (const auto& b : pyramid) total += b.value;
  double u = rng.uniform() * total;
  for (const auto& b : pyramid) {
    if (u < b.value) return rng.uniform(b.lo, std::min(b.hi, b.lo + 10.0));
    u -= b.value;
  }
  const auto& last = pyramid.back();
  return rng.uniform(last.lo, std::min(last.hi, last.lo + 10.0));
}

inline void add_clique(std::span<const AgentId> members,
                       std::vector<std::pair<AgentId, AgentId>>& edges) {
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) edges.emplace_back(members[i], members[j]);
  }
}

// Random graph on `members` with the given mean degree; a clique when the
// cluster is too small to reach it.
inline void add_random_cluster(std::span<const AgentId> members, double mean_degree, Rng& rng,
                               std::vector<std::pair<AgentId, AgentId>>& edges) {
  const std::size_t n = members.size();
  if (n < 2) return;
  if (static_cast<double>(n - 1) <= mean_degree) {
    add_clique(members, edges);
    return;
  }
  const auto target = static_cast<std::size_t>(std::llround(static_cast<double>(n) * mean_degree / 2.0));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(target * 2);
  while (seen.size() < target) {
    auto a = static_cast<std::uint32_t>(rng.below(n));
    auto b = static_cast<std::uint32_t>(rng.below(n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (seen.insert((static_cast<std::uint64_t>(a) << 32) | b).second) {
      edges.emplace_back(members[a], members[b]);
    }
  }
}

template <class Pred>
inline std::size_t build_clustered_layer(std::vector<Agent>& agents, Pred eligible,
                                         std::int64_t cluster_size, double mean_degree, Rng& rng,
                                         std::uint32_t Agent::*group, ContactLayer& out) {
  std::vector<AgentId> members;
  for (const auto& a : agents) {
    if (eligible(a)) members.push_back(a.id);
  }
  rng.shuffle(members);
  std::vector<std::pair<AgentId, AgentId>> edges;
  const auto size = static_cast<std::size_t>(cluster_size);
  std::size_t n_clusters = 0;
  for (std::size_t start = 0; start < members.size(); start += size, ++n_clusters) {
    const std::size_t end = std::min(members.size(), start + size);
    std::span<AgentId> cluster(members.data() + start, end - start);
    std::sort(cluster.begin(), cluster.end());
    for (AgentId id : cluster) agents[id].*group = static_cast<std::uint32_t>(n_clusters);
    add_random_cluster(cluster, mean_degree, rng, edges);
  }
  out = ContactLayer(agents.size(), std::move(edges));
  return n_clusters;
}

}  // namespace detail

// Builds agents, households and the static school/work layers. Households
// take consecutive ids with sizes 1 + Poisson(contacts.h); a remainder
// smaller than the mean household size joins the last household.
inline Population synthesize_population(const PopulationConfig& config, std::uint64_t seed) {
  validate(config);
  Rng rng = Rng(seed).substream("population");
  const auto n = static_cast<std::size_t>(config.pop_size);

  Population pop;
  pop.agents.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    pop.agents[i].id = static_cast<AgentId>(i);
    pop.agents[i].age = detail::sample_age(config.age_pyramid, rng);
  }

  std::vector<std::pair<AgentId, AgentId>> edges;
  const double mean_household = config.contacts.h + 1.0;
  std::size_t next = 0;
  while (next < n) {
    const std::size_t remaining = n - next;
    auto size = static_cast<std::size_t>(1 + rng.poisson(config.contacts.h));
    if (static_cast<double>(remaining) < mean_household || size >= remaining) size = remaining;
    std::vector<AgentId> members;
    for (std::size_t k = 0; k < size; ++k) {
      pop.agents[next + k].household = static_cast<std::uint32_t>(pop.n_households);
      members.push_back(static_cast<AgentId>(next + k));
    }
    detail::add_clique(members, edges);
    next += size;
    ++pop.n_households;
  }
  pop.household = ContactLayer(n, std::move(edges));

  pop.n_schools = detail::build_clustered_layer(
      pop.agents,
      [&](const Agent& a) { return a.age >= config.school_age_min && a.age < config.school_age_max; },
      config.school_size, config.contacts.s, rng, &Agent::school, pop.school);
  pop.n_workplaces = detail::build_clustered_layer(
      pop.agents,
      [&](const Agent& a) { return a.age >= config.work_age_min && a.age < config.work_age_max; },
      config.workplace_size, config.contacts.w, rng, &Agent::workplace, pop.work);
  return pop;
}

// Daily community layer: round(n * c / 2) uniformly random pairs. A pair drawn
// twice counts as two contacts.
inline ContactLayer sample_community_layer(std::size_t n_agents, double mean_degree, Rng& rng) {
  const auto n_edges =
      static_cast<std::size_t>(std::llround(static_cast<double>(n_agents) * mean_degree / 2.0));
  std::vector<std::pair<AgentId, AgentId>> edges;
  edges.reserve(n_edges);
  if (n_agents >= 2) {
    for (std::size_t k = 0; k < n_edges; ++k) {
      const auto a = static_cast<AgentId>(rng.below(n_agents));
      const auto b = static_cast<AgentId>(rng.below(n_agents));
      edges.emplace_back(a, b);
    }
  }
  return ContactLayer::from_pairs_unsorted(n_agents, edges);
}

// Number of agents seeded for a real-population count of initial infections.
inline std::int64_t seeded_agent_count(const PopulationConfig& config) {
  const auto scaled = std::llround(config.pop_infected / config.pop_scale());
  return std::max<std::int64_t>(1, scaled);
}

// Moves seeded_agent_count() distinct, uniformly chosen agents to Exposed on
// day 0. Returns the ids, ascending.
inline std::vector<AgentId> seed_infections(Population& pop, const PopulationConfig& config,
                                            const DiseaseConfig& disease, Rng& rng) {
  if (config.pop_infected < 0) throw ConfigError("population.pop_infected must be >= 0");
  const std::int64_t count = seeded_agent_count(config);
  if (std::llround(config.pop_infected / config.pop_scale()) < 1) {
    log::warning("pop_infected=" + std::to_string(config.pop_infected) +
                 " rounds to zero agents at pop_scale " + std::to_string(config.pop_scale()) +
                 "; seeding 1 agent");
  }
  if (count > static_cast<std::int64_t>(pop.size())) {
    throw ConfigError("cannot seed " + std::to_string(count) + " infections in a population of " +
                      std::to_string(pop.size()));
  }
  std::vector<AgentId> ids(pop.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<AgentId>(i);
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
    const std::size_t j = i + rng.below(ids.size() - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(count));
  std::sort(ids.begin(), ids.end());
  for (AgentId id : ids) {
    Agent& a = pop.agents[id];
    a.epi_state = EpiState::kExposed;
    a.state_entry_day = 0;
    a.scheduled_transition_day = disease.latent_duration.sample(rng);
  }
  return ids;
}

}  // namespace epirl
