#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sumcore/common.hpp"
#include "sumcore/core_engine.hpp"
#include "sumcore/graph.hpp"
#include "sumcore/summarizer.hpp"

namespace sumcore {

// Each user makes a single engage/drop decision that applies to every layer.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  StrategyProfile(std::size_t nodes, std::size_t layers, bool engaged = false)
      : layers_(layers), engaged_(nodes, engaged) {}

  static StrategyProfile from_members(std::size_t nodes, std::size_t layers, std::span<const NodeId> members) {
    StrategyProfile p(nodes, layers);
    for (NodeId v : members) p.set(v, true);
    return p;
  }

  std::size_t num_nodes() const { return engaged_.size(); }
  std::size_t num_layers() const { return layers_; }
  bool engaged(NodeId v) const { return engaged_.at(v); }
  bool engaged(NodeId v, LayerId) const { return engaged_.at(v); }
  void set(NodeId v, bool e) { engaged_.at(v) = e; }

  NodeSet engaged_nodes() const {
    NodeSet out;
    for (NodeId v = 0; v < engaged_.size(); ++v)
      if (engaged_[v]) out.push_back(v);
    return out;
  }

  // Every engaged (node, layer) pair of *this is engaged in o.
  bool subset_of(const StrategyProfile& o) const {
    for (std::size_t v = 0; v < engaged_.size(); ++v)
      if (engaged_[v] && !o.engaged_[v]) return false;
    return true;
  }

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;

 private:
  std::size_t layers_ = 0;
  std::vector<bool> engaged_;
};

// Per-node, per-layer utilities (row-major n x |L|).
struct UtilityMatrix {
  std::size_t layers = 0;
  std::vector<std::int64_t> values;
  std::int64_t at(NodeId v, LayerId l) const { return values[std::size_t(v) * layers + l]; }
  std::span<const std::int64_t> row(NodeId v) const { return {values.data() + std::size_t(v) * layers, layers}; }
};

namespace detail {

inline void check_game(const MultiplexGraph& g, const StrategyProfile& p, std::span<const Degree> k) {
  if (k.size() != g.num_layers())
    throw InvalidArgument("k vector has " + std::to_string(k.size()) + " entries, graph has " +
                          std::to_string(g.num_layers()) + " layers");
  if (p.num_nodes() != g.num_nodes()) throw InvalidArgument("strategy profile does not match graph size");
}

// Utility v would get in layer l if engaged, given the others' strategies.
inline std::int64_t engaged_utility(const MultiplexGraph& g, const StrategyProfile& p, std::span<const Degree> k,
                                    NodeId v, LayerId l) {
  std::int64_t c = 0;
  for (NodeId u : g.neighbors(l, v)) c += p.engaged(u);
  return c - std::int64_t(k[l]);
}

}  // namespace detail

// u_l(v) = (engaged neighbours of v in l) - k_l for engaged v, 0 otherwise.
inline UtilityMatrix utilities(const MultiplexGraph& g, const StrategyProfile& p, std::span<const Degree> k) {
  detail::check_game(g, p, k);
  UtilityMatrix m{g.num_layers(), std::vector<std::int64_t>(g.num_nodes() * g.num_layers(), 0)};
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (p.engaged(v))
      for (LayerId l = 0; l < g.num_layers(); ++l)
        m.values[std::size_t(v) * g.num_layers() + l] = detail::engaged_utility(g, p, k, v, l);
  return m;
}

// Final utility: the minimum over layers, so an engaged user is satisfied only
// when every layer meets its threshold.
inline std::vector<std::int64_t> final_utilities(const UtilityMatrix& m) {
  std::vector<std::int64_t> out;
  if (m.layers == 0) return out;
  for (std::size_t v = 0; v * m.layers < m.values.size(); ++v) {
    auto r = m.row(NodeId(v));
    out.push_back(*std::min_element(r.begin(), r.end()));
  }
  return out;
}

struct DeviationWitness {
  NodeId node = 0;
  LayerId layer = 0;        // layer attaining the minimum utility
  bool engaged = false;     // current strategy of the node
  std::int64_t utility = 0; // its utility in `layer` when engaged
};

struct EquilibriumCheck {
  bool equilibrium = true;
  std::optional<DeviationWitness> witness;
  explicit operator bool() const { return equilibrium; }
};

// No user gains by switching: engaged users have every layer utility >= 0 and
// no dropped user would get a strictly positive utility in all layers.
inline EquilibriumCheck is_equilibrium(const MultiplexGraph& g, const StrategyProfile& p, std::span<const Degree> k) {
  detail::check_game(g, p, k);
  const std::size_t L = g.num_layers();
  if (L == 0) return {};
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    LayerId arg = 0;
    std::int64_t lo = detail::engaged_utility(g, p, k, v, 0);
    for (LayerId l = 1; l < L; ++l) {
      auto u = detail::engaged_utility(g, p, k, v, l);
      if (u < lo) lo = u, arg = l;
    }
    bool engaged = p.engaged(v);
    if ((engaged && lo < 0) || (!engaged && lo > 0)) return {false, DeviationWitness{v, arg, engaged, lo}};
  }
  return {};
}

// The ML k-core engaged, everyone else dropped.
inline StrategyProfile max_equilibrium(const MultiplexGraph& g, std::span<const Degree> k) {
  if (k.size() != g.num_layers()) throw InvalidArgument("k vector does not match the layer count");
  auto s = Summarizer::identity(g.num_layers());
  ScvIndex t(std::vector<double>(k.begin(), k.end()));
  return StrategyProfile::from_members(g.num_nodes(), g.num_layers(), k_score_peel(g, all_nodes(g), s, t));
}

// τ(u): the largest L1 norm of the maximal SCV of a core containing u.
inline double engagement_tau(const CoreLattice& lattice, NodeId u) {
  if (!lattice.complete()) throw InvalidArgument("τ requested on an incomplete lattice");
  double best = 0;
  for (const Core* c : lattice.cores_containing(u)) best = std::max(best, c->scv.l1());
  return best;
}

inline std::vector<double> engagement_scores(const CoreLattice& lattice, std::size_t n) {
  std::vector<double> tau(n);
  for (NodeId v = 0; v < n; ++v) tau[v] = engagement_tau(lattice, v);
  return tau;
}

// Departure labels keyed by dense node id. Lines are "node,departed" with
// departed in {0,1}; an optional first line starting with "node" is a header.
// Unlabelled nodes stay empty.
inline std::vector<std::optional<bool>> parse_departures(std::istream& in, const MultiplexGraph& g) {
  std::vector<std::optional<bool>> out(g.num_nodes());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("node", 0) == 0) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected \"node,departed\"", lineno);
    std::uint64_t node = 0;
    int flag = -1;
    try {
      std::size_t used = 0;
      node = std::stoull(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("node");
      std::string f = line.substr(comma + 1);
      if (f == "0") flag = 0;
      else if (f == "1") flag = 1;
    } catch (const std::exception&) {
      throw ParseError("malformed node id", lineno);
    }
    if (flag < 0) throw ParseError("departed must be 0 or 1", lineno);
    auto v = g.node_index(node);
    if (v < 0) throw ParseError("unknown node " + std::to_string(node), lineno);
    out[std::size_t(v)] = flag == 1;
  }
  return out;
}

struct DepartureBin {
  double tau_lo = 0;
  double tau_hi = 0;
  std::size_t nodes = 0;
  std::size_t departed = 0;
  double rate() const { return nodes ? double(departed) / double(nodes) : 0.0; }
};

// Equal-width τ bins over [0, max τ] among labelled nodes; empty bins are left out.
inline std::vector<DepartureBin> departure_curve(std::span<const double> tau,
                                                 std::span<const std::optional<bool>> departed,
                                                 std::size_t bins = 5) {
  if (bins == 0) throw InvalidArgument("bin count must be positive");
  if (tau.size() != departed.size()) throw InvalidArgument("τ and departure labels differ in length");
  double top = 0;
  for (std::size_t v = 0; v < tau.size(); ++v)
    if (departed[v]) top = std::max(top, tau[v]);
  double width = top > 0 ? top / double(bins) : 1.0;
  std::vector<DepartureBin> all(bins);
  for (std::size_t b = 0; b < bins; ++b) all[b].tau_lo = width * double(b), all[b].tau_hi = width * double(b + 1);
  for (std::size_t v = 0; v < tau.size(); ++v) {
    if (!departed[v]) continue;
    std::size_t b = std::min(bins - 1, static_cast<std::size_t>(tau[v] / width));
    ++all[b].nodes;
    all[b].departed += *departed[v];
  }
  std::vector<DepartureBin> out;
  for (auto& b : all)
    if (b.nodes) out.push_back(b);
  return out;
}

}  // namespace sumcore
