#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sumcore/common.hpp"
#include "sumcore/graph.hpp"

namespace sumcore::gen {

// Erdős–Rényi edges per layer, each pair independently with probability p.
inline MultiplexGraph random_multiplex(std::size_t n, std::size_t layers, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<LayerEdge> edges;
  for (LayerId l = 0; l < layers; ++l)
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (coin(rng)) edges.push_back({l, u, v});
  return MultiplexGraph::from_edges(n, layers, edges);
}

// m uniformly drawn node pairs per layer (duplicates and loops discarded), for
// graphs too large for pairwise coin flips.
inline MultiplexGraph random_sparse(std::size_t n, std::size_t layers, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::vector<LayerEdge> edges;
  edges.reserve(layers * m);
  for (LayerId l = 0; l < layers; ++l)
    for (std::size_t i = 0; i < m; ++i) {
      NodeId u = pick(rng), v = pick(rng);
      if (u != v) edges.push_back({l, u, v});
    }
  return MultiplexGraph::from_edges(n, layers, edges);
}

// Per-node weights drawn uniformly from `choices`.
inline MultiplexGraph with_random_weights(const MultiplexGraph& g, std::span<const double> choices,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
  std::vector<double> w(g.num_nodes() * g.num_layers());
  for (auto& x : w) x = choices[pick(rng)];
  return g.with_weights(std::move(w));
}

// Temporal multiplex graph with a dense core community and a population whose
// latent activity a in [0,1) scales its edge probabilities. Departures are
// drawn with a probability that falls linearly in a; core members rarely leave.
struct PlantedTemporal {
  MultiplexGraph graph;
  std::vector<double> activity;  // 1 for core members
  std::vector<int> tier;         // 0 for a < 0.5, 1 for a >= 0.5, 2 for the core
  std::vector<bool> departed;
};

struct PlantedTemporalOptions {
  std::size_t core = 100, others = 1900;
  std::size_t layers = 4;
  double p_core = 0.12;          // inside the core
  double p_core_other = 0.016;   // core to a node of activity 1
  double p_other = 0.014;        // between two nodes of activity 1
  double depart_core = 0.05;
  double depart_idle = 0.9, depart_active = 0.2;  // at a = 0 and a = 1
};

inline PlantedTemporal planted_temporal(std::uint64_t seed, const PlantedTemporalOptions& o = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = o.core + o.others;
  PlantedTemporal out;
  out.activity.resize(n);
  out.tier.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    out.activity[v] = v < o.core ? 1.0 : unit(rng);
    out.tier[v] = v < o.core ? 2 : out.activity[v] >= 0.5 ? 1 : 0;
  }
  auto prob = [&](NodeId u, NodeId v) {
    bool cu = u < o.core, cv = v < o.core;
    if (cu && cv) return o.p_core;
    if (cu || cv) return o.p_core_other * out.activity[cu ? v : u];
    return o.p_other * out.activity[u] * out.activity[v];
  };
  std::vector<LayerEdge> edges;
  for (LayerId l = 0; l < o.layers; ++l)
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (unit(rng) < prob(u, v)) edges.push_back({l, u, v});
  out.graph = MultiplexGraph::from_edges(n, o.layers, edges);
  out.departed.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    double rate = v < o.core ? o.depart_core
                             : o.depart_idle + (o.depart_active - o.depart_idle) * out.activity[v];
    out.departed[v] = unit(rng) < rate;
  }
  return out;
}

}  // namespace sumcore::gen
