#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sumcore/common.hpp"

namespace sumcore {

// One undirected edge of a single layer, in dense ids.
struct LayerEdge {
  LayerId layer;
  NodeId u;
  NodeId v;
};

struct ParseOptions {
  bool drop_self_loops = false;
};

// Immutable multiplex graph: a shared node set, one simple undirected graph per
// layer stored as sorted CSR neighbor arrays, and a weight w(u, l) >= 0 for every
// node-layer pair. File ids may be sparse; they are densified in ascending order
// and the original ids are retained for output.
class MultiplexGraph {
 public:
  MultiplexGraph() = default;

  // Builds from dense ids. Duplicate and symmetric-duplicate edges are merged;
  // self-loops are rejected.
  static MultiplexGraph from_edges(std::size_t num_nodes, std::size_t num_layers,
                                   std::span<const LayerEdge> edges) {
    MultiplexGraph g;
    g.n_ = num_nodes;
    g.L_ = num_layers;
    g.node_ids_.resize(num_nodes);
    std::iota(g.node_ids_.begin(), g.node_ids_.end(), std::uint64_t{0});
    g.layer_ids_.resize(num_layers);
    std::iota(g.layer_ids_.begin(), g.layer_ids_.end(), std::uint64_t{0});
    g.build(edges);
    g.weights_.assign(num_nodes * num_layers, 1.0);
    g.index_ids();
    return g;
  }

  std::size_t num_nodes() const { return n_; }
  std::size_t num_layers() const { return L_; }
  std::size_t num_edges() const { return total_edges_; }
  std::size_t num_edges(LayerId l) const { return (offsets_[l][n_]) / 2; }
  std::size_t dedup_dropped() const { return dedup_dropped_; }

  std::span<const NodeId> neighbors(LayerId l, NodeId v) const {
    const auto& off = offsets_[l];
    return {adj_[l].data() + off[v], adj_[l].data() + off[v + 1]};
  }
  Degree degree(LayerId l, NodeId v) const {
    return static_cast<Degree>(offsets_[l][v + 1] - offsets_[l][v]);
  }
  std::vector<Degree> degree_vector(NodeId v) const {
    std::vector<Degree> d(L_);
    for (LayerId l = 0; l < L_; ++l) d[l] = degree(l, v);
    return d;
  }
  bool has_edge(LayerId l, NodeId u, NodeId v) const {
    auto nb = neighbors(l, u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  double weight(NodeId v, LayerId l) const { return weights_[std::size_t(v) * L_ + l]; }
  std::span<const double> weights_of(NodeId v) const {
    return {weights_.data() + std::size_t(v) * L_, L_};
  }
  bool unit_weights() const {
    return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 1.0; });
  }

  // Layer-level weight: mean of w(u, l) over all nodes.
  double layer_weight(LayerId l) const {
    if (n_ == 0) return 1.0;
    double s = 0;
    for (NodeId v = 0; v < n_; ++v) s += weight(v, l);
    return s / static_cast<double>(n_);
  }

  std::uint64_t original_node_id(NodeId v) const { return node_ids_[v]; }
  std::uint64_t original_layer_id(LayerId l) const { return layer_ids_[l]; }
  const std::string& layer_label(LayerId l) const { return layer_labels_.at(l); }

  // Dense id of an original id, or -1 when unknown.
  std::int64_t node_index(std::uint64_t original) const {
    auto it = node_lookup_.find(original);
    return it == node_lookup_.end() ? -1 : static_cast<std::int64_t>(it->second);
  }
  std::int64_t layer_index(std::uint64_t original) const {
    auto it = layer_lookup_.find(original);
    return it == layer_lookup_.end() ? -1 : static_cast<std::int64_t>(it->second);
  }

  // Returns a copy with the given row-major n x L weight matrix.
  MultiplexGraph with_weights(std::vector<double> weights) const {
    if (weights.size() != n_ * L_) throw InvalidArgument("weight matrix has wrong size");
    for (double w : weights)
      if (!(w >= 0)) throw InvalidArgument("negative weight");
    MultiplexGraph g = *this;
    g.weights_ = std::move(weights);
    return g;
  }
  // Same weight row for every node.
  MultiplexGraph with_layer_weights(std::span<const double> per_layer) const {
    if (per_layer.size() != L_) throw InvalidArgument("layer weight vector has wrong size");
    std::vector<double> w(n_ * L_);
    for (std::size_t v = 0; v < n_; ++v)
      std::copy(per_layer.begin(), per_layer.end(), w.begin() + v * L_);
    return with_weights(std::move(w));
  }

  std::vector<LayerEdge> edges() const {
    std::vector<LayerEdge> out;
    out.reserve(total_edges_);
    for (LayerId l = 0; l < L_; ++l)
      for (NodeId u = 0; u < n_; ++u)
        for (NodeId v : neighbors(l, u))
          if (u < v) out.push_back({l, u, v});
    return out;
  }

 private:
  friend MultiplexGraph parse_edge_list(std::istream&, const ParseOptions&);

  void build(std::span<const LayerEdge> edges) {
    std::vector<std::vector<std::pair<NodeId, NodeId>>> per_layer(L_);
    for (const auto& e : edges) {
      if (e.layer >= L_ || e.u >= n_ || e.v >= n_) throw InvalidArgument("edge id out of range");
      if (e.u == e.v) throw InvalidArgument("self-loop on node " + std::to_string(e.u));
      per_layer[e.layer].emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    }
    offsets_.assign(L_, {});
    adj_.assign(L_, {});
    total_edges_ = 0;
    dedup_dropped_ = 0;
    for (LayerId l = 0; l < L_; ++l) {
      auto& es = per_layer[l];
      std::sort(es.begin(), es.end());
      auto last = std::unique(es.begin(), es.end());
      dedup_dropped_ += static_cast<std::size_t>(es.end() - last);
      es.erase(last, es.end());
      total_edges_ += es.size();
      auto& off = offsets_[l];
      off.assign(n_ + 1, 0);
      for (auto [u, v] : es) {
        ++off[u + 1];
        ++off[v + 1];
      }
      for (std::size_t i = 0; i < n_; ++i) off[i + 1] += off[i];
      auto& a = adj_[l];
      a.resize(off[n_]);
      std::vector<std::size_t> cursor(off.begin(), off.end() - 1);
      for (auto [u, v] : es) {
        a[cursor[u]++] = v;
        a[cursor[v]++] = u;
      }
      for (NodeId v = 0; v < n_; ++v) std::sort(a.begin() + off[v], a.begin() + off[v + 1]);
    }
  }

  void index_ids() {
    node_lookup_.clear();
    layer_lookup_.clear();
    for (NodeId v = 0; v < n_; ++v) node_lookup_.emplace(node_ids_[v], v);
    for (LayerId l = 0; l < L_; ++l) layer_lookup_.emplace(layer_ids_[l], l);
    if (layer_labels_.size() != L_) {
      layer_labels_.clear();
      for (auto id : layer_ids_) layer_labels_.push_back(std::to_string(id));
    }
  }

  std::size_t n_ = 0;
  std::size_t L_ = 0;
  std::size_t total_edges_ = 0;
  std::size_t dedup_dropped_ = 0;
  std::vector<std::vector<std::size_t>> offsets_;
  std::vector<std::vector<NodeId>> adj_;
  std::vector<double> weights_;
  std::vector<std::uint64_t> node_ids_;
  std::vector<std::uint64_t> layer_ids_;
  std::vector<std::string> layer_labels_;
  std::unordered_map<std::uint64_t, NodeId> node_lookup_;
  std::unordered_map<std::uint64_t, LayerId> layer_lookup_;
};

namespace detail {

inline bool blank_or_comment(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

inline bool parse_uint(const std::string& tok, std::uint64_t& out) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) return false;
  try {
    out = std::stoull(tok);
  } catch (...) {
    return false;
  }
  return true;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> toks;
  for (std::string t; ss >> t;) toks.push_back(t);
  return toks;
}

}  // namespace detail

// Parses "layer src dst" lines. '#' lines and blank lines are skipped.
inline MultiplexGraph parse_edge_list(std::istream& in, const ParseOptions& options = {}) {
  struct Raw {
    std::uint64_t layer, u, v;
  };
  std::vector<Raw> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank_or_comment(line)) continue;
    auto toks = detail::split_ws(line);
    Raw r{};
    if (toks.size() != 3 || !detail::parse_uint(toks[0], r.layer) ||
        !detail::parse_uint(toks[1], r.u) || !detail::parse_uint(toks[2], r.v))
      throw ParseError("expected \"layer src dst\" with nonnegative integers", lineno);
    if (r.u == r.v) {
      if (options.drop_self_loops) continue;
      throw ParseError("self-loop on node " + toks[1], lineno);
    }
    raw.push_back(r);
  }
  if (raw.empty()) throw ParseError("empty graph: no edges");

  std::vector<std::uint64_t> nodes, layers;
  for (const auto& r : raw) {
    nodes.push_back(r.u);
    nodes.push_back(r.v);
    layers.push_back(r.layer);
  }
  auto dedup = [](std::vector<std::uint64_t>& xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  };
  dedup(nodes);
  dedup(layers);
  auto dense = [](const std::vector<std::uint64_t>& xs, std::uint64_t x) {
    return static_cast<std::uint32_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  };
  std::vector<LayerEdge> edges;
  edges.reserve(raw.size());
  for (const auto& r : raw) edges.push_back({dense(layers, r.layer), dense(nodes, r.u), dense(nodes, r.v)});

  MultiplexGraph g;
  g.n_ = nodes.size();
  g.L_ = layers.size();
  g.node_ids_ = std::move(nodes);
  g.layer_ids_ = std::move(layers);
  g.build(edges);
  g.weights_.assign(g.n_ * g.L_, 1.0);
  g.index_ids();
  return g;
}

inline MultiplexGraph load_edge_list(const std::string& path, const ParseOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list: " + path);
  return parse_edge_list(in, options);
}

// Writes the graph back in edge-list form with original ids.
inline void write_edge_list(const MultiplexGraph& g, std::ostream& out) {
  for (const auto& e : g.edges())
    out << g.original_layer_id(e.layer) << ' ' << g.original_node_id(e.u) << ' '
        << g.original_node_id(e.v) << '\n';
}

// Reads "node layer weight" lines, or "layer weight" lines broadcast to every
// node. Ids are the original file ids. Unlisted pairs keep weight 1.0.
inline MultiplexGraph parse_weights(std::istream& in, const MultiplexGraph& graph) {
  const std::size_t n = graph.num_nodes(), L = graph.num_layers();
  std::vector<double> w(n * L, 1.0);
  int form = 0;  // 2 = broadcast, 3 = per node
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank_or_comment(line)) continue;
    auto toks = detail::split_ws(line);
    if (toks.size() != 2 && toks.size() != 3)
      throw ParseError("expected \"node layer weight\" or \"layer weight\"", lineno);
    int this_form = static_cast<int>(toks.size());
    if (form && form != this_form) throw ParseError("mixed per-node and broadcast weight lines", lineno);
    form = this_form;

    double value = 0;
    try {
      std::size_t used = 0;
      value = std::stod(toks.back(), &used);
      if (used != toks.back().size()) throw std::invalid_argument("trailing");
    } catch (...) {
      throw ParseError("bad weight value \"" + toks.back() + "\"", lineno);
    }
    if (!(value >= 0) || !std::isfinite(value)) throw ParseError("negative or non-finite weight", lineno);

    std::uint64_t layer_raw = 0, node_raw = 0;
    const std::string& layer_tok = toks[this_form == 3 ? 1 : 0];
    if (!detail::parse_uint(layer_tok, layer_raw)) throw ParseError("bad layer id", lineno);
    auto l = graph.layer_index(layer_raw);
    if (l < 0) throw ParseError("unknown layer " + layer_tok, lineno);
    if (this_form == 3) {
      if (!detail::parse_uint(toks[0], node_raw)) throw ParseError("bad node id", lineno);
      auto v = graph.node_index(node_raw);
      if (v < 0) throw ParseError("unknown node " + toks[0], lineno);
      w[std::size_t(v) * L + std::size_t(l)] = value;
    } else {
      for (std::size_t v = 0; v < n; ++v) w[v * L + std::size_t(l)] = value;
    }
  }
  return graph.with_weights(std::move(w));
}

inline MultiplexGraph load_weights(const std::string& path, const MultiplexGraph& graph) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open weight file: " + path);
  return parse_weights(in, graph);
}

// One (neighbor, layer) degree decrement caused by a node removal.
struct Decrement {
  NodeId node;
  LayerId layer;
  friend bool operator==(const Decrement&, const Decrement&) = default;
};

// Mutable induced-subgraph state over an immutable graph: the alive set and the
// exact induced degree vector of every alive node. Single owner; never shared for
// concurrent mutation.
class SubgraphView {
 public:
  SubgraphView(const MultiplexGraph& g, std::span<const NodeId> seed)
      : g_(&g), L_(g.num_layers()), alive_(g.num_nodes(), 0), deg_(g.num_nodes() * L_, 0) {
    for (NodeId v : seed) {
      if (v >= g.num_nodes()) throw InvalidArgument("seed node out of range");
      if (!alive_[v]) {
        alive_[v] = 1;
        ++alive_count_;
      }
    }
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (!alive_[v]) continue;
      for (LayerId l = 0; l < L_; ++l) {
        Degree d = 0;
        for (NodeId u : g.neighbors(l, v)) d += alive_[u];
        deg_[std::size_t(v) * L_ + l] = d;
      }
    }
  }

  const MultiplexGraph& graph() const { return *g_; }
  bool alive(NodeId v) const { return alive_[v] != 0; }
  std::size_t size() const { return alive_count_; }
  bool empty() const { return alive_count_ == 0; }

  std::span<const Degree> degrees(NodeId v) const {
    return {deg_.data() + std::size_t(v) * L_, L_};
  }
  Degree degree(NodeId v, LayerId l) const { return deg_[std::size_t(v) * L_ + l]; }

  NodeSet members() const {
    NodeSet out;
    out.reserve(alive_count_);
    for (NodeId v = 0; v < alive_.size(); ++v)
      if (alive_[v]) out.push_back(v);
    return out;
  }
  const std::vector<NodeId>& removal_log() const { return removed_; }

  // Removes v and calls on_decrement(u, l) for every alive neighbor u in layer l
  // after its degree has been decremented.
  template <typename F>
  void remove_node(NodeId v, F&& on_decrement) {
    if (v >= alive_.size() || !alive_[v]) throw InvalidArgument("remove_node: node is not alive");
    alive_[v] = 0;
    --alive_count_;
    removed_.push_back(v);
    for (LayerId l = 0; l < L_; ++l) {
      for (NodeId u : g_->neighbors(l, v)) {
        if (!alive_[u]) continue;
        --deg_[std::size_t(u) * L_ + l];
        on_decrement(u, l);
      }
    }
  }

  std::vector<Decrement> remove_node(NodeId v) {
    std::vector<Decrement> out;
    remove_node(v, [&](NodeId u, LayerId l) { out.push_back({u, l}); });
    return out;
  }

 private:
  const MultiplexGraph* g_;
  std::size_t L_;
  std::vector<char> alive_;
  std::vector<Degree> deg_;
  std::size_t alive_count_ = 0;
  std::vector<NodeId> removed_;
};

inline SubgraphView make_view(const MultiplexGraph& g, std::span<const NodeId> seed) {
  return SubgraphView(g, seed);
}

inline NodeSet all_nodes(const MultiplexGraph& g) {
  NodeSet s(g.num_nodes());
  std::iota(s.begin(), s.end(), NodeId{0});
  return s;
}

// Ids in `set` translated to original file ids.
inline std::vector<std::uint64_t> original_ids(const MultiplexGraph& g, std::span<const NodeId> set) {
  std::vector<std::uint64_t> out;
  out.reserve(set.size());
  for (NodeId v : set) out.push_back(g.original_node_id(v));
  return out;
}

}  // namespace sumcore
