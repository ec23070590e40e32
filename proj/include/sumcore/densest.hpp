#pragma once

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sumcore/common.hpp"
#include "sumcore/graph.hpp"
#include "sumcore/parallel.hpp"
#include "sumcore/summarizer.hpp"
#include "sumcore/wfirmcore.hpp"

namespace sumcore {

// How a node's contribution to the multiplex density is formed.
//  top_lambda:  max over λ of Top-λ(deg, w) * λ^β  (canonical)
//  min_product: max over layer sets of min(deg_l * w(u,l)) * (Σ w(u,l'))^β
enum class TermForm { top_lambda, min_product };

// Where the λ candidates come from: each node's own subset sums, or one global
// set shared by all nodes.
enum class PhiMode { per_node, global };

struct DensityOptions {
  double beta = 1.0;
  TermForm form = TermForm::top_lambda;
  PhiMode phi = PhiMode::per_node;
  std::vector<double> global_phi;  // sorted; used when phi == global
};

struct TermValue {
  double value = 0;
  double best_lambda = 0;
};

namespace detail {

inline bool strictly_better(double a, double b) { return a > b + 1e-12 * std::max(1.0, std::abs(b)); }

// Layers sorted by key descending; within each run of equal keys the cumulative
// weight covers the whole run.
template <typename KeyFn>
TermValue best_prefix(std::size_t L, std::span<const double> w, double beta, KeyFn key,
                      const std::vector<double>* phi) {
  std::vector<std::uint32_t> idx(L);
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return key(a) > key(b); });
  TermValue best;
  double cum = 0;
  for (std::size_t j = 0; j < L; ++j) {
    cum += w[idx[j]];
    if (j + 1 < L && key(idx[j + 1]) == key(idx[j])) continue;
    double k = key(idx[j]);
    if (k <= 0) break;
    double lambda = cum;
    if (phi) {
      auto it = std::upper_bound(phi->begin(), phi->end(), cum + kTolerance);
      if (it == phi->begin()) continue;
      lambda = *std::prev(it);
    }
    if (lambda <= 0) continue;
    double v = k * std::pow(lambda, beta);
    if (strictly_better(v, best.value)) best = {v, lambda};
  }
  return best;
}

}  // namespace detail

// A node's density term from its induced degree vector.
inline TermValue density_term(std::span<const Degree> deg, std::span<const double> w, const DensityOptions& opt) {
  const std::size_t L = deg.size();
  const std::vector<double>* phi = opt.phi == PhiMode::global ? &opt.global_phi : nullptr;
  if (opt.form == TermForm::min_product)
    return detail::best_prefix(L, w, opt.beta, [&](std::uint32_t l) { return double(deg[l]) * w[l]; }, phi);
  return detail::best_prefix(L, w, opt.beta, [&](std::uint32_t l) { return double(deg[l]); }, phi);
}

namespace detail {

inline std::vector<char> membership(const MultiplexGraph& g, std::span<const NodeId> subset) {
  std::vector<char> in(g.num_nodes(), 0);
  for (NodeId v : subset) {
    if (v >= g.num_nodes()) throw InvalidArgument("subset node out of range");
    in[v] = 1;
  }
  return in;
}

inline std::vector<Degree> induced_degrees(const MultiplexGraph& g, const std::vector<char>& in, NodeId u) {
  std::vector<Degree> d(g.num_layers(), 0);
  for (LayerId l = 0; l < g.num_layers(); ++l)
    for (NodeId x : g.neighbors(l, u)) d[l] += in[x];
  return d;
}

inline std::vector<std::size_t> induced_edge_counts(const MultiplexGraph& g, const std::vector<char>& in,
                                                    std::span<const NodeId> subset) {
  std::vector<std::size_t> e(g.num_layers(), 0);
  for (NodeId u : subset)
    for (LayerId l = 0; l < g.num_layers(); ++l)
      for (NodeId x : g.neighbors(l, u))
        if (in[x] && u < x) ++e[l];
  return e;
}

inline void require_nonempty(std::span<const NodeId> subset) {
  if (subset.empty()) throw InvalidArgument("density of an empty subset");
}

}  // namespace detail

// Term of node u within G[subset].
inline TermValue node_density_term(const MultiplexGraph& g, std::span<const NodeId> subset, NodeId u,
                                   const DensityOptions& opt) {
  if (!(opt.beta > 0)) throw InvalidArgument("β must be positive");
  auto in = detail::membership(g, subset);
  if (u >= g.num_nodes() || !in[u]) throw InvalidArgument("node is not in the subset");
  return density_term(detail::induced_degrees(g, in, u), g.weights_of(u), opt);
}

inline TermValue node_density_term(const MultiplexGraph& g, std::span<const NodeId> subset, NodeId u, double beta) {
  DensityOptions opt;
  opt.beta = beta;
  return node_density_term(g, subset, u, opt);
}

// Mean over the subset of each node's density term.
inline double our_density(const MultiplexGraph& g, std::span<const NodeId> subset, const DensityOptions& opt) {
  detail::require_nonempty(subset);
  if (!(opt.beta > 0)) throw InvalidArgument("β must be positive");
  auto in = detail::membership(g, subset);
  double total = 0;
  for (NodeId u : subset) total += density_term(detail::induced_degrees(g, in, u), g.weights_of(u), opt).value;
  return total / static_cast<double>(subset.size());
}

inline double our_density(const MultiplexGraph& g, std::span<const NodeId> subset, double beta) {
  DensityOptions opt;
  opt.beta = beta;
  return our_density(g, subset, opt);
}

namespace detail {

inline double ml_density_from_counts(std::vector<std::size_t> edges, std::size_t size, double beta) {
  std::sort(edges.begin(), edges.end(), std::greater<>());
  double best = 0;
  for (std::size_t j = 0; j < edges.size(); ++j) {
    double v = double(edges[j]) / double(size) * std::pow(double(j + 1), beta);
    best = std::max(best, v);
  }
  return best;
}

inline double edge_density_from_counts(const MultiplexGraph& g, const std::vector<std::size_t>& edges,
                                       std::size_t size) {
  double num = 0, wstar = 0;
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    double wl = g.layer_weight(l);
    num += wl * double(edges[l]);
    wstar += wl;
  }
  double pairs = double(size) * double(size - 1) / 2.0;
  return wstar > 0 ? num / (wstar * pairs) : 0.0;
}

}  // namespace detail

// Max over non-empty layer sets of (min per-layer |E_l[S]| / |S|) * |set|^β.
// For a fixed set size the best set is the densest layers, so a prefix scan
// over layers sorted by edge count is exact.
inline double ml_density(const MultiplexGraph& g, std::span<const NodeId> subset, double beta) {
  detail::require_nonempty(subset);
  auto in = detail::membership(g, subset);
  return detail::ml_density_from_counts(detail::induced_edge_counts(g, in, subset), subset.size(), beta);
}

// Σ_l w_l |E_l[S]| / (w* C(|S|, 2)) with w_l the mean node weight of layer l.
inline double edge_density(const MultiplexGraph& g, std::span<const NodeId> subset) {
  if (subset.size() < 2) throw InvalidArgument("edge density needs at least two nodes");
  auto in = detail::membership(g, subset);
  return detail::edge_density_from_counts(g, detail::induced_edge_counts(g, in, subset), subset.size());
}

enum class Objective { new_density, ml, edge };

// Distinct non-empty subset sums (subset size <= max_size) of the given weight
// rows, deduplicated on a 1e-6 grid. Zero sums are dropped. When more than
// `cap` sums exist the single-layer sums are kept and the rest are filled in
// ascending order; `truncated` reports it.
struct LambdaCandidates {
  std::vector<double> values;
  bool truncated = false;
};

inline LambdaCandidates subset_sum_candidates(const MultiplexGraph& g, std::size_t max_size,
                                              std::size_t cap = 10'000) {
  const std::size_t L = g.num_layers();
  auto grid = [](double x) { return static_cast<std::int64_t>(std::llround(x * 1e6)); };
  std::set<std::vector<double>> rows;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto w = g.weights_of(v);
    rows.emplace(w.begin(), w.end());
  }
  LambdaCandidates out;
  std::map<std::int64_t, double> all;
  std::map<std::int64_t, double> singles;
  // Per row: minimal subset size reaching each sum.
  for (const auto& row : rows) {
    std::map<std::int64_t, std::pair<double, std::size_t>> reach;  // key -> (sum, min size)
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<std::pair<std::int64_t, std::pair<double, std::size_t>>> add;
      for (const auto& [key, ss] : reach)
        if (ss.second < max_size) add.push_back({grid(ss.first + row[l]), {ss.first + row[l], ss.second + 1}});
      add.push_back({grid(row[l]), {row[l], 1}});
      for (auto& [key, ss] : add) {
        auto [it, fresh] = reach.try_emplace(key, ss);
        if (!fresh && ss.second < it->second.second) it->second.second = ss.second;
      }
      if (reach.size() > 4 * cap) {
        out.truncated = true;
        while (reach.size() > 4 * cap) reach.erase(std::prev(reach.end()));
      }
      singles.try_emplace(grid(row[l]), row[l]);
    }
    for (const auto& [key, ss] : reach) all.try_emplace(key, ss.first);
  }
  std::set<std::int64_t> keep;
  for (const auto& [key, v] : singles)
    if (v > 0) keep.insert(key);
  for (const auto& [key, v] : all) {
    if (v <= 0) continue;
    if (keep.size() >= cap && !keep.count(key)) {
      out.truncated = true;
      continue;
    }
    keep.insert(key);
  }
  for (auto key : keep) out.values.push_back(all.count(key) ? all[key] : singles[key]);
  return out;
}

// Φ shared by all nodes: every subset sum of every weight row.
inline std::vector<double> global_phi(const MultiplexGraph& g, std::size_t cap = 10'000) {
  return subset_sum_candidates(g, g.num_layers(), cap).values;
}

struct DensityReport {
  NodeSet subset;
  double rho_new = 0;
  double rho_ml = 0;
  std::optional<double> rho_edge;  // undefined below two nodes
  double beta = 1;
  double lambda = 0;  // λ of the winning WFirmCore
  Degree k = 0;       // k of the winning WFirmCore
  std::vector<std::pair<NodeId, TermValue>> per_node_terms;
  std::size_t candidates = 0;
  bool truncated = false;
};

struct ApproxOptions {
  DensityOptions density;
  Objective objective = Objective::new_density;
  std::size_t candidate_cap = 10'000;
  unsigned threads = 1;
};

namespace detail {

// Evaluates the nested (k, λ)-cores of one λ from the innermost outward,
// maintaining induced degrees, per-layer edge counts and per-node terms.
struct NestedEvaluation {
  double density = -1;
  std::size_t size = 0;
  Degree k = 0;
};

inline NestedEvaluation evaluate_nested(const MultiplexGraph& g, const std::vector<Degree>& wcore,
                                        const ApproxOptions& opt) {
  const std::size_t n = g.num_nodes(), L = g.num_layers();
  NestedEvaluation best;
  if (n == 0) return best;
  Degree top = *std::max_element(wcore.begin(), wcore.end());
  std::vector<std::vector<NodeId>> levels(std::size_t(top) + 1);
  for (NodeId v = 0; v < n; ++v) levels[wcore[v]].push_back(v);

  std::vector<char> in(n, 0), dirty(n, 0);
  std::vector<Degree> deg(n * L, 0);
  std::vector<double> term(n, 0);
  std::vector<std::size_t> edges(L, 0);
  std::vector<NodeId> dirty_list;
  double sum = 0;
  std::size_t size = 0;
  for (Degree k = top + 1; k-- > 0;) {
    if (levels[k].empty()) continue;
    for (NodeId v : levels[k]) {
      in[v] = 1;
      ++size;
      for (LayerId l = 0; l < L; ++l)
        for (NodeId u : g.neighbors(l, v)) {
          if (!in[u] || u == v) continue;
          ++deg[std::size_t(u) * L + l];
          ++deg[std::size_t(v) * L + l];
          ++edges[l];
          if (!dirty[u]) dirty[u] = 1, dirty_list.push_back(u);
        }
      if (!dirty[v]) dirty[v] = 1, dirty_list.push_back(v);
    }
    if (opt.objective == Objective::new_density) {
      for (NodeId u : dirty_list) {
        dirty[u] = 0;
        double t = density_term(std::span<const Degree>(deg.data() + std::size_t(u) * L, L), g.weights_of(u),
                                opt.density).value;
        sum += t - term[u];
        term[u] = t;
      }
    } else {
      for (NodeId u : dirty_list) dirty[u] = 0;
    }
    dirty_list.clear();

    double rho = 0;
    switch (opt.objective) {
      case Objective::new_density: rho = sum / double(size); break;
      case Objective::ml: rho = ml_density_from_counts(edges, size, opt.density.beta); break;
      case Objective::edge: rho = size >= 2 ? edge_density_from_counts(g, edges, size) : 0.0; break;
    }
    // prefer the denser core; on ties the smaller one, which comes first
    if (strictly_better(rho, best.density)) best = {rho, size, k};
  }
  return best;
}

}  // namespace detail

// Builds the full report (all three densities and per-node terms) for a subset.
inline DensityReport density_report(const MultiplexGraph& g, NodeSet subset, const DensityOptions& opt) {
  DensityReport r;
  r.beta = opt.beta;
  r.subset = std::move(subset);
  if (r.subset.empty()) return r;
  auto in = detail::membership(g, r.subset);
  double total = 0;
  for (NodeId u : r.subset) {
    auto t = density_term(detail::induced_degrees(g, in, u), g.weights_of(u), opt);
    total += t.value;
    r.per_node_terms.emplace_back(u, t);
  }
  r.rho_new = total / double(r.subset.size());
  r.rho_ml = ml_density(g, r.subset, opt.beta);
  if (r.subset.size() >= 2) r.rho_edge = edge_density(g, r.subset);
  return r;
}

// Approximate multiplex densest subgraph: candidate λ values are subset sums of
// at most α layer weights; for each λ every (k, λ)-WFirmCore is scored and the
// densest one over all λ is returned.
inline DensityReport wfc_approx(const MultiplexGraph& g, std::size_t alpha, const ApproxOptions& opt = {}) {
  if (alpha < 1 || alpha > g.num_layers())
    throw InvalidArgument("α out of range: need 1 <= α <= " + std::to_string(g.num_layers()));
  if (!(opt.density.beta > 0)) throw InvalidArgument("β must be positive");
  auto cand = subset_sum_candidates(g, alpha, opt.candidate_cap);
  if (cand.values.empty()) cand.values.push_back(0.0);
  LambdaSet lambdas(cand.values);
  auto table = wfirmcore_decompose(g, lambdas);

  std::vector<detail::NestedEvaluation> evals(lambdas.size());
  parallel_for(lambdas.size(), opt.threads,
               [&](std::size_t i) { evals[i] = detail::evaluate_nested(g, table.column(i), opt); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < evals.size(); ++i) {
    const auto &a = evals[i], &b = evals[best];
    if (detail::strictly_better(a.density, b.density) ||
        (!detail::strictly_better(b.density, a.density) && a.size < b.size))
      best = i;
  }
  auto report = density_report(g, table.core(evals[best].k, best), opt.density);
  report.lambda = lambdas[best];
  report.k = evals[best].k;
  report.candidates = lambdas.size();
  report.truncated = cand.truncated;
  return report;
}

// Constants of the approximation guarantee.
struct GuaranteeConstants {
  double omega = 0;        // max over nodes of total layer weight
  Degree mu_star = 0;      // min degree inside the densest single-layer subgraph
  double psi = 0;          // max λ with a non-empty (μ*, λ)-WFirmCore
  double factor = 0;       // min(α, ψ)^β / (2 Ω^β)
  LayerId densest_layer = 0;
  NodeSet densest_single_layer;
  double single_layer_density = 0;  // average-degree measure |E_l[S]| / |S|
  bool mu_star_exact = true;        // false when the greedy 2-approximation was used
};

namespace detail {

struct LayerDensest {
  NodeSet subset;
  double density = 0;
};

// Exact densest subgraph of one layer by subset enumeration (n < 15). Ties go
// to the smaller subset, then the lexicographically smaller one.
inline LayerDensest exact_layer_densest(const MultiplexGraph& g, LayerId l) {
  const std::size_t n = g.num_nodes();
  LayerDensest best;
  std::vector<char> in(n, 0);
  std::size_t edges = 0, size = 0;
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << n); ++i) {
    NodeId v = static_cast<NodeId>(std::countr_zero(i));
    std::size_t nb = 0;
    for (NodeId u : g.neighbors(l, v)) nb += in[u];
    if (in[v]) {
      in[v] = 0, --size, edges -= nb;
    } else {
      in[v] = 1, ++size, edges += nb;
    }
    if (size == 0) continue;
    double rho = double(edges) / double(size);
    bool take = best.subset.empty() || strictly_better(rho, best.density);
    if (!take && !strictly_better(best.density, rho)) {
      if (size < best.subset.size()) take = true;
      else if (size == best.subset.size()) {
        NodeSet cur;
        for (NodeId x = 0; x < n; ++x)
          if (in[x]) cur.push_back(x);
        take = cur < best.subset;
      }
    }
    if (take) {
      best.density = rho;
      best.subset.clear();
      for (NodeId x = 0; x < n; ++x)
        if (in[x]) best.subset.push_back(x);
    }
  }
  return best;
}

// Greedy min-degree peeling, the classic 2-approximation.
inline LayerDensest greedy_layer_densest(const MultiplexGraph& g, LayerId l) {
  const std::size_t n = g.num_nodes();
  std::vector<Degree> deg(n);
  std::size_t edges = g.num_edges(l);
  Degree maxd = 0;
  for (NodeId v = 0; v < n; ++v) maxd = std::max(maxd, deg[v] = g.degree(l, v));
  std::vector<std::vector<NodeId>> bucket(std::size_t(maxd) + 1);
  for (NodeId v = n; v-- > 0;) bucket[deg[v]].push_back(v);
  std::vector<char> alive(n, 1);
  std::vector<NodeId> order;
  double best = double(edges) / double(n);
  std::size_t best_removed = 0;
  Degree cur = 0;
  for (std::size_t removed = 0; removed + 1 < n; ++removed) {
    NodeId v = 0;
    for (cur = cur > 0 ? cur - 1 : 0;; ++cur) {
      auto& b = bucket[cur];
      while (!b.empty() && (!alive[b.back()] || deg[b.back()] != cur)) b.pop_back();
      if (!b.empty()) {
        v = b.back();
        b.pop_back();
        break;
      }
    }
    alive[v] = 0;
    order.push_back(v);
    edges -= deg[v];
    for (NodeId u : g.neighbors(l, v))
      if (alive[u]) bucket[--deg[u]].push_back(u);
    double rho = double(edges) / double(n - removed - 1);
    if (strictly_better(rho, best)) best = rho, best_removed = removed + 1;
  }
  std::vector<char> in(n, 1);
  for (std::size_t i = 0; i < best_removed; ++i) in[order[i]] = 0;
  LayerDensest out;
  out.density = best;
  for (NodeId v = 0; v < n; ++v)
    if (in[v]) out.subset.push_back(v);
  return out;
}

}  // namespace detail

inline GuaranteeConstants guarantee_constants(const MultiplexGraph& g, std::size_t alpha, double beta,
                                              std::size_t exact_below = 15) {
  GuaranteeConstants c;
  const std::size_t n = g.num_nodes(), L = g.num_layers();
  for (NodeId v = 0; v < n; ++v) {
    double s = 0;
    for (double w : g.weights_of(v)) s += w;
    c.omega = std::max(c.omega, s);
  }
  if (n == 0 || L == 0) return c;

  c.mu_star_exact = n < exact_below;
  bool have = false;
  for (LayerId l = 0; l < L; ++l) {
    auto d = c.mu_star_exact ? detail::exact_layer_densest(g, l) : detail::greedy_layer_densest(g, l);
    bool take = !have || detail::strictly_better(d.density, c.single_layer_density) ||
                (!detail::strictly_better(c.single_layer_density, d.density) &&
                 d.subset.size() < c.densest_single_layer.size());
    if (take) {
      have = true;
      c.densest_layer = l;
      c.single_layer_density = d.density;
      c.densest_single_layer = std::move(d.subset);
    }
  }
  Degree mu = std::numeric_limits<Degree>::max();
  {
    auto in = detail::membership(g, c.densest_single_layer);
    for (NodeId v : c.densest_single_layer) {
      Degree dv = 0;
      for (NodeId u : g.neighbors(c.densest_layer, v)) dv += in[u];
      mu = std::min(mu, dv);
    }
  }
  c.mu_star = mu;

  // Non-emptiness of the (μ*, λ)-WFirmCore is non-increasing in λ.
  auto lambdas = global_phi(g);
  std::size_t lo = 0, hi = lambdas.size();  // first λ index whose core is empty
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (wfirmcore_at(g, c.mu_star, lambdas[mid]).empty()) hi = mid;
    else lo = mid + 1;
  }
  c.psi = lo > 0 ? lambdas[lo - 1] : 0.0;
  c.factor = c.omega > 0 ? std::pow(std::min(double(alpha), c.psi), beta) / (2.0 * std::pow(c.omega, beta)) : 0.0;
  return c;
}

}  // namespace sumcore
