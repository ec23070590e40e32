#pragma once

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sumcore/common.hpp"
#include "sumcore/graph.hpp"
#include "sumcore/parallel.hpp"
#include "sumcore/summarizer.hpp"

namespace sumcore {

// d-dimensional core threshold vector. Equality and order are decided on the
// quantized keys so real-valued summaries compare stably.
struct ScvIndex {
  std::vector<double> values;

  ScvIndex() = default;
  explicit ScvIndex(std::vector<double> v) : values(std::move(v)) {}
  ScvIndex(std::initializer_list<double> v) : values(v) {}

  std::size_t dims() const { return values.size(); }
  std::vector<QKey> keys() const { return quantize(values); }
  double l1() const { return std::accumulate(values.begin(), values.end(), 0.0); }

  // Componentwise >=.
  bool dominates(const ScvIndex& o) const {
    auto a = keys(), b = o.keys();
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] < b[i]) return false;
    return true;
  }
  friend bool operator==(const ScvIndex& a, const ScvIndex& b) { return a.keys() == b.keys(); }
};

struct Core {
  ScvIndex scv;
  NodeSet members;
  std::vector<ScvIndex> parents;
};

namespace detail {

inline bool keys_dominate(std::span<const QKey> a, std::span<const QKey> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] < b[i]) return false;
  return true;
}

// Peeling state shared by the single-core peel and the bucketed DFS path: a
// SubgraphView plus a cached summary of every alive node. With buckets enabled,
// each dimension keeps an ordered map from summary key to nodes (lazily
// invalidated) so the current minimum is available without a scan.
class Peeler {
 public:
  Peeler(const MultiplexGraph& g, std::span<const NodeId> seed, const Summarizer& s, bool buckets)
      : g_(g), s_(s), d_(s.dims()), view_(g, seed), value_(g.num_nodes() * d_), key_(g.num_nodes() * d_),
        queued_(g.num_nodes(), 0), touched_(g.num_nodes(), 0) {
    if (s.num_layers() != g.num_layers()) throw InvalidArgument("summarizer layer count does not match graph");
    if (buckets) buckets_.resize(d_);
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      if (view_.alive(v)) refresh(v);
  }

  void set_threshold(std::vector<QKey> t) {
    if (t.size() != d_) throw InvalidArgument("threshold dimension does not match summarizer");
    threshold_ = std::move(t);
  }

  // Full scan for violators, then cascade.
  void peel() {
    for (NodeId v = 0; v < g_.num_nodes(); ++v)
      if (view_.alive(v) && violates(v)) enqueue(v);
    cascade();
  }

  // After raising only threshold[i]: violators are read off dimension i's buckets.
  void peel_raised(std::size_t i) {
    auto& b = buckets_[i];
    for (auto it = b.begin(); it != b.end() && it->first < threshold_[i]; ++it)
      for (NodeId v : it->second)
        if (view_.alive(v) && key_[v * d_ + i] == it->first) enqueue(v);
    cascade();
  }

  bool empty() const { return view_.empty(); }
  NodeSet members() const { return view_.members(); }
  const SubgraphView& view() const { return view_; }

  // Componentwise min of alive summaries (requires buckets and a non-empty view).
  void min_summary(std::vector<QKey>& keys, std::vector<double>& values) {
    keys.resize(d_);
    values.resize(d_);
    for (std::size_t i = 0; i < d_; ++i) {
      auto& b = buckets_[i];
      for (;;) {
        if (b.empty()) throw Error("min_summary on an empty view");
        auto it = b.begin();
        auto& vec = it->second;
        while (!vec.empty()) {
          NodeId v = vec.back();
          if (view_.alive(v) && key_[v * d_ + i] == it->first) break;
          vec.pop_back();
        }
        if (vec.empty()) {
          b.erase(it);
          continue;
        }
        keys[i] = it->first;
        values[i] = value_[vec.back() * d_ + i];
        break;
      }
    }
  }

 private:
  void refresh(NodeId v) {
    std::span<double> out(value_.data() + std::size_t(v) * d_, d_);
    s_.eval(view_.degrees(v), g_.weights_of(v), out);
    for (std::size_t i = 0; i < d_; ++i) {
      QKey k = quantize(out[i]);
      QKey& slot = key_[std::size_t(v) * d_ + i];
      if (!buckets_.empty() && (fresh_ || slot != k)) buckets_[i][k].push_back(v);
      slot = k;
    }
  }

  bool violates(NodeId v) const {
    const QKey* k = key_.data() + std::size_t(v) * d_;
    for (std::size_t i = 0; i < d_; ++i)
      if (k[i] < threshold_[i]) return true;
    return false;
  }

  void enqueue(NodeId v) {
    if (queued_[v]) return;
    queued_[v] = 1;
    queue_.push_back(v);
  }

  void cascade() {
    fresh_ = false;
    std::vector<NodeId> touched;
    while (!queue_.empty()) {
      NodeId v = queue_.front();
      queue_.pop_front();
      queued_[v] = 0;
      if (!view_.alive(v)) continue;
      view_.remove_node(v, [&](NodeId u, LayerId) {
        if (!touched_[u]) {
          touched_[u] = 1;
          touched.push_back(u);
        }
      });
      for (NodeId u : touched) {
        touched_[u] = 0;
        refresh(u);
        if (violates(u)) enqueue(u);
      }
      touched.clear();
    }
  }

  const MultiplexGraph& g_;
  const Summarizer& s_;
  std::size_t d_;
  SubgraphView view_;
  std::vector<double> value_;
  std::vector<QKey> key_;
  std::vector<char> queued_;
  std::vector<char> touched_;
  std::deque<NodeId> queue_;
  std::vector<QKey> threshold_;
  std::vector<std::map<QKey, std::vector<NodeId>>> buckets_;
  bool fresh_ = true;
};

// One element of a threshold sweep: the threshold that produced the core, the
// core's members and its maximal SCV.
struct PathStep {
  std::vector<QKey> threshold;
  NodeSet members;
  std::vector<QKey> scv_keys;
  std::vector<double> scv;
};

// Sweeps threshold[i] upward from `threshold`, emitting every distinct core.
// Each step raises threshold[i] one grid unit above the current core's minimum
// in dimension i; the other components stay fixed.
inline std::vector<PathStep> sweep_dimension(const MultiplexGraph& g, std::span<const NodeId> seed,
                                             const Summarizer& s, std::vector<QKey> threshold, std::size_t i) {
  std::vector<PathStep> path;
  Peeler p(g, seed, s, true);
  p.set_threshold(threshold);
  p.peel();
  while (!p.empty()) {
    PathStep step;
    step.threshold = threshold;
    step.members = p.members();
    p.min_summary(step.scv_keys, step.scv);
    threshold[i] = step.scv_keys[i] + 1;
    path.push_back(std::move(step));
    p.set_threshold(threshold);
    p.peel_raised(i);
  }
  return path;
}

}  // namespace detail

// Unique maximal H within `seed` whose members all satisfy S(deg^H(v), w_v) >= k.
inline NodeSet k_score_peel(const MultiplexGraph& g, std::span<const NodeId> seed, const Summarizer& s,
                            const ScvIndex& k) {
  if (k.dims() != s.dims()) throw InvalidArgument("threshold dimension does not match summarizer");
  detail::Peeler p(g, seed, s, false);
  p.set_threshold(k.keys());
  p.peel();
  return p.members();
}

// Componentwise minimum of the member summaries within G[members].
inline ScvIndex maximal_scv(const MultiplexGraph& g, std::span<const NodeId> members, const Summarizer& s) {
  if (members.empty()) throw InvalidArgument("maximal_scv: empty member set");
  SubgraphView view(g, members);
  std::vector<double> mins(s.dims(), std::numeric_limits<double>::infinity());
  std::vector<double> out(s.dims());
  for (NodeId v : members) {
    s.eval(view.degrees(v), g.weights_of(v), out);
    for (std::size_t i = 0; i < out.size(); ++i) mins[i] = std::min(mins[i], out[i]);
  }
  return ScvIndex(std::move(mins));
}

// The nested chain of distinct cores obtained by raising the i-th (0-based)
// threshold from k[i] while holding the other thresholds at k.
inline std::vector<Core> dfs_path(const MultiplexGraph& g, std::span<const NodeId> seed, const Summarizer& s,
                                  const ScvIndex& k, std::size_t i) {
  if (i >= s.dims()) throw InvalidArgument("dfs_path: invalid dimension " + std::to_string(i));
  if (k.dims() != s.dims()) throw InvalidArgument("threshold dimension does not match summarizer");
  std::vector<Core> chain;
  for (auto& step : detail::sweep_dimension(g, seed, s, k.keys(), i)) {
    Core c{ScvIndex(std::move(step.scv)), std::move(step.members), {}};
    if (!chain.empty()) c.parents.push_back(chain.back().scv);
    chain.push_back(std::move(c));
  }
  return chain;
}

struct DecomposeLimits {
  std::size_t max_states = 1'000'000;
  double max_seconds = 0;  // 0 = unlimited
  unsigned threads = 1;
};

// All distinct non-empty S-cores, keyed by maximal SCV.
class CoreLattice {
 public:
  using Key = std::vector<QKey>;

  CoreLattice() = default;
  CoreLattice(std::string summarizer, std::size_t dims) : summarizer_(std::move(summarizer)), dims_(dims) {}

  const std::string& summarizer() const { return summarizer_; }
  std::size_t dims() const { return dims_; }
  bool complete() const { return complete_; }
  std::size_t states_explored() const { return states_; }
  double seconds() const { return seconds_; }
  std::size_t size() const { return cores_.size(); }
  const std::map<Key, Core>& cores() const { return cores_; }

  const Core* find(const ScvIndex& scv) const {
    auto it = cores_.find(scv.keys());
    return it == cores_.end() ? nullptr : &it->second;
  }

  // Pareto-maximal SCV indices. Unsound on a truncated lattice, so it throws.
  std::vector<ScvIndex> skyline() const {
    if (!complete_) throw InvalidArgument("skyline requested on an incomplete lattice");
    std::vector<ScvIndex> out;
    for (const auto& [key, core] : cores_) {
      bool dominated = false;
      for (const auto& [other, _] : cores_)
        if (other != key && detail::keys_dominate(other, key)) {
          dominated = true;
          break;
        }
      if (!dominated) out.push_back(core.scv);
    }
    return out;
  }

  // Members of the k-S-core, read off the lattice: the union of all stored cores
  // whose maximal SCV dominates k.
  NodeSet core_at(const ScvIndex& k) const {
    auto t = k.keys();
    std::set<NodeId> acc;
    for (const auto& [key, core] : cores_)
      if (detail::keys_dominate(key, t)) acc.insert(core.members.begin(), core.members.end());
    return {acc.begin(), acc.end()};
  }

  // Cores containing v.
  std::vector<const Core*> cores_containing(NodeId v) const {
    std::vector<const Core*> out;
    if (v < membership_.size())
      for (const Key* k : membership_[v]) out.push_back(&cores_.at(*k));
    return out;
  }

 private:
  friend CoreLattice decompose(const MultiplexGraph&, const Summarizer&, const DecomposeLimits&);

  void insert(Key key, std::vector<double> scv, NodeSet members, const std::vector<double>* parent) {
    auto [it, fresh] = cores_.try_emplace(std::move(key));
    if (fresh) {
      it->second.scv = ScvIndex(std::move(scv));
      it->second.members = std::move(members);
    }
    if (parent) {
      ScvIndex p(*parent);
      if (!(p == it->second.scv) &&
          std::find(it->second.parents.begin(), it->second.parents.end(), p) == it->second.parents.end())
        it->second.parents.push_back(std::move(p));
    }
  }

  void index_members(std::size_t n) {
    membership_.assign(n, {});
    for (const auto& [key, core] : cores_)
      for (NodeId v : core.members) membership_[v].push_back(&key);
  }

  std::string summarizer_;
  std::size_t dims_ = 0;
  std::map<Key, Core> cores_;
  std::vector<std::vector<const Key*>> membership_;
  bool complete_ = true;
  std::size_t states_ = 0;
  double seconds_ = 0;
};

// Enumerates every distinct non-empty S-core. A state is a threshold vector
// with its core; from each state the DFS sweep along every dimension yields the
// children, which become states in turn. Thresholds are visited once. Every
// child is peeled from its parent core, never from V.
inline CoreLattice decompose(const MultiplexGraph& g, const Summarizer& s, const DecomposeLimits& limits = {}) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const std::size_t d = s.dims();
  CoreLattice lattice(s.name(), d);

  struct State {
    std::vector<QKey> threshold;
    NodeSet seed;
    std::size_t skip;  // dimension already swept by the chain that produced this state
  };
  std::set<std::vector<QKey>> visited;
  std::vector<State> frontier{{std::vector<QKey>(d, 0), all_nodes(g), d}};
  visited.insert(frontier.front().threshold);

  auto over_budget = [&] {
    if (limits.max_seconds > 0 &&
        std::chrono::duration<double>(Clock::now() - start).count() > limits.max_seconds)
      return true;
    return visited.size() > limits.max_states;
  };

  while (!frontier.empty()) {
    // One sweep per (state, dimension); computed independently, merged in order.
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t si = 0; si < frontier.size(); ++si)
      for (std::size_t i = 0; i < d; ++i)
        if (i != frontier[si].skip) jobs.emplace_back(si, i);
    std::vector<std::vector<detail::PathStep>> paths(jobs.size());
    parallel_for(jobs.size(), limits.threads, [&](std::size_t j) {
      const auto& st = frontier[jobs[j].first];
      paths[j] = detail::sweep_dimension(g, st.seed, s, st.threshold, jobs[j].second);
    });

    std::vector<State> next;
    bool stop = false;
    for (std::size_t j = 0; j < jobs.size() && !stop; ++j) {
      auto& path = paths[j];
      for (std::size_t p = 0; p < path.size(); ++p) {
        auto& step = path[p];
        const std::vector<double>* parent = p > 0 ? &path[p - 1].scv : nullptr;
        NodeSet members = step.members;
        lattice.insert(step.scv_keys, step.scv, std::move(members), parent);
        if (p > 0 && visited.insert(step.threshold).second)
          next.push_back({std::move(step.threshold), std::move(step.members), jobs[j].second});
      }
      if (over_budget()) stop = true;
    }
    // A sweep over no dimension (d == 1 chain states) contributes nothing further.
    if (stop) {
      lattice.complete_ = false;
      break;
    }
    frontier = std::move(next);
  }
  // d == 0 is impossible for built-in summarizers; an edgeless graph still has the root core.
  lattice.states_ = visited.size();
  lattice.seconds_ = std::chrono::duration<double>(Clock::now() - start).count();
  lattice.index_members(g.num_nodes());
  return lattice;
}

inline std::vector<ScvIndex> skyline(const CoreLattice& lattice) { return lattice.skyline(); }

}  // namespace sumcore
