#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sumcore/common.hpp"
#include "sumcore/core_engine.hpp"
#include "sumcore/graph.hpp"
#include "sumcore/summarizer.hpp"

// Brute-force references. They reuse summarizer evaluation but none of the
// peeling code, so they can check the engines independently.
namespace sumcore::oracle {

struct OracleBudget {
  std::size_t max_nodes = 14;
  std::uint64_t max_subsets = std::uint64_t{1} << 14;
};

inline void check_budget(const MultiplexGraph& g, const OracleBudget& b) {
  if (g.num_nodes() > b.max_nodes || g.num_nodes() >= 63 || (std::uint64_t{1} << g.num_nodes()) > b.max_subsets + 1)
    throw BudgetExceeded("oracle budget exceeded: " + std::to_string(g.num_nodes()) + " nodes (limit " +
                         std::to_string(b.max_nodes) + ")");
}

// Visits every non-empty subset in Gray-code order. The callback sees the
// membership mask and the induced degree matrix (row-major n x |L|).
class SubsetWalker {
 public:
  explicit SubsetWalker(const MultiplexGraph& g) : g_(g), n_(g.num_nodes()), L_(g.num_layers()) {
    adj_.assign(n_ * L_, 0);
    for (LayerId l = 0; l < L_; ++l)
      for (NodeId v = 0; v < n_; ++v)
        for (NodeId u : g.neighbors(l, v)) adj_[std::size_t(v) * L_ + l] |= std::uint64_t{1} << u;
  }

  template <typename F>
  void run(F&& fn) {
    std::vector<Degree> deg(n_ * L_, 0);
    std::uint64_t mask = 0;
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << n_); ++i) {
      NodeId v = static_cast<NodeId>(std::countr_zero(i));
      bool adding = !(mask >> v & 1);
      mask ^= std::uint64_t{1} << v;
      for (LayerId l = 0; l < L_; ++l) {
        std::uint64_t nb = adj_[std::size_t(v) * L_ + l] & mask;
        Degree cnt = static_cast<Degree>(std::popcount(nb));
        for (std::uint64_t m = nb; m; m &= m - 1) {
          NodeId u = static_cast<NodeId>(std::countr_zero(m));
          deg[std::size_t(u) * L_ + l] += adding ? 1 : Degree(-1);
        }
        deg[std::size_t(v) * L_ + l] = adding ? cnt : 0;
      }
      if (mask) fn(mask, std::span<const Degree>(deg));
    }
  }

  std::span<const Degree> row(std::span<const Degree> deg, NodeId v) const { return deg.subspan(std::size_t(v) * L_, L_); }

 private:
  const MultiplexGraph& g_;
  std::size_t n_, L_;
  std::vector<std::uint64_t> adj_;
};

inline NodeSet mask_to_set(std::uint64_t mask) {
  NodeSet out;
  for (std::uint64_t m = mask; m; m &= m - 1) out.push_back(static_cast<NodeId>(std::countr_zero(m)));
  return out;
}

// Union of all subsets on which every member satisfies `ok(v, degrees)`.
// Feasible sets are closed under union, so this is the unique maximal one.
template <typename Pred>
NodeSet brute_max_feasible(const MultiplexGraph& g, Pred ok, const OracleBudget& b = {}) {
  check_budget(g, b);
  SubsetWalker walker(g);
  std::uint64_t acc = 0;
  walker.run([&](std::uint64_t mask, std::span<const Degree> deg) {
    if ((mask | acc) == acc) return;
    for (std::uint64_t m = mask; m; m &= m - 1) {
      NodeId v = static_cast<NodeId>(std::countr_zero(m));
      if (!ok(v, walker.row(deg, v))) return;
    }
    acc |= mask;
  });
  return mask_to_set(acc);
}

inline NodeSet brute_core(const MultiplexGraph& g, const Summarizer& s, const ScvIndex& k, const OracleBudget& b = {}) {
  if (k.dims() != s.dims()) throw InvalidArgument("threshold dimension does not match summarizer");
  auto t = k.keys();
  std::vector<double> out(s.dims());
  return brute_max_feasible(
      g,
      [&](NodeId v, std::span<const Degree> deg) {
        s.eval(deg, g.weights_of(v), out);
        for (std::size_t i = 0; i < out.size(); ++i)
          if (quantize(out[i]) < t[i]) return false;
        return true;
      },
      b);
}

// Whether every member of `set` meets k under s inside G[set].
inline bool is_feasible(const MultiplexGraph& g, const Summarizer& s, const ScvIndex& k, std::span<const NodeId> set) {
  auto t = k.keys();
  std::vector<char> in(g.num_nodes(), 0);
  for (NodeId v : set) in[v] = 1;
  std::vector<Degree> deg(g.num_layers());
  std::vector<double> out(s.dims());
  for (NodeId v : set) {
    for (LayerId l = 0; l < g.num_layers(); ++l) {
      deg[l] = 0;
      for (NodeId u : g.neighbors(l, v)) deg[l] += in[u];
    }
    s.eval(deg, g.weights_of(v), out);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (quantize(out[i]) < t[i]) return false;
  }
  return true;
}

// Definitional multilayer k-core: deg_l >= k_l in every layer.
inline NodeSet brute_ml_core(const MultiplexGraph& g, std::span<const Degree> k, const OracleBudget& b = {}) {
  if (k.size() != g.num_layers()) throw InvalidArgument("k vector does not match the layer count");
  return brute_max_feasible(
      g,
      [&](NodeId, std::span<const Degree> deg) {
        for (std::size_t l = 0; l < deg.size(); ++l)
          if (deg[l] < k[l]) return false;
        return true;
      },
      b);
}

// Definitional FirmCore: degree >= k in at least λ layers.
inline NodeSet brute_firmcore(const MultiplexGraph& g, Degree k, std::size_t lambda, const OracleBudget& b = {}) {
  return brute_max_feasible(
      g,
      [&](NodeId, std::span<const Degree> deg) {
        std::size_t c = 0;
        for (Degree d : deg) c += d >= k;
        return c >= lambda;
      },
      b);
}

// Definitional CoreCube: degree >= k in every layer of the chosen subset.
inline NodeSet brute_corecube(const MultiplexGraph& g, std::span<const LayerId> layers, Degree k,
                              const OracleBudget& b = {}) {
  return brute_max_feasible(
      g,
      [&](NodeId, std::span<const Degree> deg) {
        for (LayerId l : layers)
          if (deg[l] < k) return false;
        return true;
      },
      b);
}

// Maximal SCV of every non-empty subset, so any k-S-core is the union of the
// subsets whose SCV dominates k.
class BruteCoreTable {
 public:
  BruteCoreTable(const MultiplexGraph& g, const Summarizer& s, const OracleBudget& b = {}) : d_(s.dims()) {
    check_budget(g, b);
    SubsetWalker walker(g);
    std::vector<double> out(d_);
    walker.run([&](std::uint64_t mask, std::span<const Degree> deg) {
      std::vector<QKey> mins(d_, std::numeric_limits<QKey>::max());
      for (std::uint64_t m = mask; m; m &= m - 1) {
        NodeId v = static_cast<NodeId>(std::countr_zero(m));
        s.eval(walker.row(deg, v), g.weights_of(v), out);
        for (std::size_t i = 0; i < d_; ++i) mins[i] = std::min(mins[i], quantize(out[i]));
      }
      auto& slot = by_scv_[mins];
      slot |= mask;
    });
  }

  NodeSet core_at(const ScvIndex& k) const {
    auto t = k.keys();
    std::uint64_t acc = 0;
    for (const auto& [scv, mask] : by_scv_)
      if (detail::keys_dominate(scv, t)) acc |= mask;
    return mask_to_set(acc);
  }

  // Distinct SCV keys of all non-empty subsets.
  std::vector<std::vector<QKey>> scvs() const {
    std::vector<std::vector<QKey>> out;
    for (const auto& [scv, _] : by_scv_) out.push_back(scv);
    return out;
  }

 private:
  std::size_t d_;
  std::map<std::vector<QKey>, std::uint64_t> by_scv_;
};

// WFirmCore by repeated full scans: recompute induced degrees from scratch and
// drop every node whose weighted Top-λ falls below k, until nothing changes.
inline NodeSet brute_wcore(const MultiplexGraph& g, Degree k, double lambda, const OracleBudget& b = {}) {
  check_budget(g, b);
  const std::size_t n = g.num_nodes(), L = g.num_layers();
  std::vector<char> in(n, 1);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<char> keep = in;
    for (NodeId v = 0; v < n; ++v) {
      if (!in[v]) continue;
      // largest k' with total weight of layers where deg >= k' at least λ
      Degree best = 0;
      Degree maxdeg = 0;
      std::vector<Degree> deg(L, 0);
      for (LayerId l = 0; l < L; ++l) {
        for (NodeId u : g.neighbors(l, v)) deg[l] += in[u];
        maxdeg = std::max(maxdeg, deg[l]);
      }
      for (Degree kk = maxdeg; kk >= 1; --kk) {
        double w = 0;
        for (LayerId l = 0; l < L; ++l)
          if (deg[l] >= kk) w += g.weight(v, l);
        if (w >= lambda - kTolerance) {
          best = kk;
          break;
        }
      }
      if (best < k) keep[v] = 0, changed = true;
    }
    in = std::move(keep);
  }
  NodeSet out;
  for (NodeId v = 0; v < n; ++v)
    if (in[v]) out.push_back(v);
  return out;
}

// Density term by enumerating every layer subset: Φ_u is the set of distinct
// subset sums of w(u,·), and for each λ the Top-λ degree is found by scanning k.
inline double enumerated_term(std::span<const Degree> deg, std::span<const double> w, double beta) {
  const std::size_t L = deg.size();
  std::map<QKey, double> phi;
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << L); ++m) {
    double s = 0;
    for (std::size_t l = 0; l < L; ++l)
      if (m >> l & 1) s += w[l];
    phi.try_emplace(quantize(s), s);
  }
  Degree maxdeg = deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
  double best = 0;
  for (const auto& [_, lambda] : phi) {
    Degree top = 0;
    for (Degree k = maxdeg; k >= 1; --k) {
      double s = 0;
      for (std::size_t l = 0; l < L; ++l)
        if (deg[l] >= k) s += w[l];
      if (s >= lambda - kTolerance) {
        top = k;
        break;
      }
    }
    best = std::max(best, double(top) * std::pow(lambda, beta));
  }
  return best;
}

struct DensestResult {
  NodeSet subset;
  double density = 0;
};

// Exact optimum of the multiplex density; ties go to the smaller subset, then
// the lexicographically smaller node list.
inline DensestResult brute_densest(const MultiplexGraph& g, double beta, const OracleBudget& b = {}) {
  check_budget(g, b);
  if (!(beta > 0)) throw InvalidArgument("β must be positive");
  SubsetWalker walker(g);
  DensestResult best;
  std::uint64_t best_mask = 0;
  auto rank = [](std::uint64_t a, std::uint64_t c) {  // a before c in the tie order
    int pa = std::popcount(a), pc = std::popcount(c);
    if (pa != pc) return pa < pc;
    return mask_to_set(a) < mask_to_set(c);
  };
  walker.run([&](std::uint64_t mask, std::span<const Degree> deg) {
    double total = 0;
    for (std::uint64_t m = mask; m; m &= m - 1) {
      NodeId v = static_cast<NodeId>(std::countr_zero(m));
      total += enumerated_term(walker.row(deg, v), g.weights_of(v), beta);
    }
    double rho = total / double(std::popcount(mask));
    double tol = 1e-12 * std::max(1.0, std::abs(best.density));
    if (!best_mask || rho > best.density + tol ||
        (rho >= best.density - tol && rank(mask, best_mask))) {
      best_mask = mask;
      best.density = rho;
    }
  });
  best.subset = mask_to_set(best_mask);
  return best;
}

}  // namespace sumcore::oracle
