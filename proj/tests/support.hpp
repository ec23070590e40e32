#pragma once

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include "sumcore/generators.hpp"
#include "sumcore/oracle.hpp"
#include "sumcore/sumcore.hpp"

namespace testing_support {

using namespace sumcore;

// Two layers over nodes 1..4: a triangle on {1,2,3} plus edge 3-4 in layer 0,
// edges 1-2 and 3-4 in layer 1.
inline MultiplexGraph g1() {
  std::istringstream in("0 1 2\n0 1 3\n0 2 3\n0 3 4\n1 1 2\n1 3 4\n");
  return parse_edge_list(in);
}

// Original ids of a dense node set.
inline std::vector<std::uint64_t> orig(const MultiplexGraph& g, const NodeSet& s) {
  std::vector<std::uint64_t> out;
  for (NodeId v : s) out.push_back(g.original_node_id(v));
  return out;
}

inline NodeSet dense(const MultiplexGraph& g, std::initializer_list<std::uint64_t> ids) {
  NodeSet out;
  for (auto x : ids) out.push_back(static_cast<NodeId>(g.node_index(x)));
  std::sort(out.begin(), out.end());
  return out;
}

// Peels by removing one uniformly chosen violator at a time, recomputing every
// summary from scratch. Shares nothing with the engine's peeling.
inline NodeSet random_order_peel(const MultiplexGraph& g, const Summarizer& s, const ScvIndex& k,
                                 std::mt19937_64& rng) {
  const std::size_t n = g.num_nodes(), L = g.num_layers();
  auto t = k.keys();
  std::vector<char> in(n, 1);
  std::vector<Degree> deg(L);
  std::vector<double> out(s.dims());
  for (;;) {
    std::vector<NodeId> bad;
    for (NodeId v = 0; v < n; ++v) {
      if (!in[v]) continue;
      for (LayerId l = 0; l < L; ++l) {
        deg[l] = 0;
        for (NodeId u : g.neighbors(l, v)) deg[l] += in[u];
      }
      s.eval(deg, g.weights_of(v), out);
      for (std::size_t i = 0; i < out.size(); ++i)
        if (quantize(out[i]) < t[i]) {
          bad.push_back(v);
          break;
        }
    }
    if (bad.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, bad.size() - 1);
    in[bad[pick(rng)]] = 0;
  }
  NodeSet res;
  for (NodeId v = 0; v < n; ++v)
    if (in[v]) res.push_back(v);
  return res;
}

// Textbook single-layer core numbers (Batagelj–Zaversnik style, simple version).
inline std::vector<Degree> classic_core_numbers(const MultiplexGraph& g, LayerId l) {
  const std::size_t n = g.num_nodes();
  std::vector<Degree> deg(n), core(n);
  std::vector<char> done(n, 0);
  for (NodeId v = 0; v < n; ++v) deg[v] = g.degree(l, v);
  Degree k = 0;
  for (std::size_t it = 0; it < n; ++it) {
    NodeId best = 0;
    Degree bd = std::numeric_limits<Degree>::max();
    for (NodeId v = 0; v < n; ++v)
      if (!done[v] && deg[v] < bd) bd = deg[v], best = v;
    k = std::max(k, bd);
    core[best] = k;
    done[best] = 1;
    for (NodeId u : g.neighbors(l, best))
      if (!done[u]) --deg[u];
  }
  return core;
}

// Random summarizer of a given layer count for property tests.
inline Summarizer random_summarizer(std::size_t L, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 5);
  switch (pick(rng)) {
    case 0: return Summarizer::identity(L);
    case 1: return Summarizer::sum(L);
    case 2: return Summarizer::minmax(L);
    case 3: return Summarizer::top_lambda(std::uniform_int_distribution<std::size_t>(1, L)(rng), L);
    case 4: return Summarizer::wsum(L);
    default: {
      std::vector<std::size_t> ranks{1};
      if (L > 1) ranks.push_back(L);
      return Summarizer::order_stats(ranks, L);
    }
  }
}

}  // namespace testing_support
