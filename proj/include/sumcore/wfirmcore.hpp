#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sumcore/common.hpp"
#include "sumcore/core_engine.hpp"
#include "sumcore/graph.hpp"
#include "sumcore/summarizer.hpp"

namespace sumcore {

// Strictly increasing set of nonnegative λ values.
class LambdaSet {
 public:
  LambdaSet() = default;
  explicit LambdaSet(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidArgument("λ set is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] >= 0) || !std::isfinite(values_[i])) throw InvalidArgument("λ values must be nonnegative");
      if (i && !(values_[i] > values_[i - 1])) throw InvalidArgument("λ set must be sorted and duplicate-free");
    }
  }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

// Wcore_λ(v) for every node and every λ of a LambdaSet.
class WcoreTable {
 public:
  WcoreTable() = default;
  WcoreTable(LambdaSet lambdas, std::size_t n) : lambdas_(std::move(lambdas)), wcore_(lambdas_.size(), std::vector<Degree>(n, 0)) {}

  const LambdaSet& lambdas() const { return lambdas_; }
  std::size_t num_nodes() const { return wcore_.empty() ? 0 : wcore_.front().size(); }
  Degree at(NodeId v, std::size_t lambda_index) const { return wcore_[lambda_index][v]; }
  const std::vector<Degree>& column(std::size_t lambda_index) const { return wcore_[lambda_index]; }
  std::vector<Degree>& column(std::size_t lambda_index) { return wcore_[lambda_index]; }

  // Members of the (k, λ_i)-WFirmCore.
  NodeSet core(Degree k, std::size_t lambda_index) const {
    NodeSet out;
    const auto& col = wcore_[lambda_index];
    for (NodeId v = 0; v < col.size(); ++v)
      if (col[v] >= k) out.push_back(v);
    return out;
  }

  Degree max_k(std::size_t lambda_index) const {
    const auto& col = wcore_[lambda_index];
    return col.empty() ? 0 : *std::max_element(col.begin(), col.end());
  }

 private:
  LambdaSet lambdas_;
  std::vector<std::vector<Degree>> wcore_;
};

// The (k, λ)-WFirmCore: a k-S-core under the weighted Top-λ summarizer.
inline NodeSet wfirmcore_at(const MultiplexGraph& g, Degree k, double lambda) {
  auto s = Summarizer::wtop_lambda(lambda, g.num_layers());
  return k_score_peel(g, all_nodes(g), s, ScvIndex{double(k)});
}

// Bucket peeling over every λ in increasing order. For λ_i with i > 1 each
// node's starting index is capped by its Wcore at λ_{i-1}, which upper-bounds
// it by nestedness in λ.
inline WcoreTable wfirmcore_decompose(const MultiplexGraph& g, const LambdaSet& lambdas) {
  if (lambdas.size() == 0) throw InvalidArgument("λ set is empty");
  const std::size_t n = g.num_nodes();
  WcoreTable table(lambdas, n);
  std::vector<Degree> index(n);
  std::vector<std::vector<NodeId>> buckets;
  std::vector<char> touched(n, 0);
  std::vector<NodeId> touched_list;

  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const double lambda = lambdas[li];
    SubgraphView view(g, all_nodes(g));
    Degree top = 0;
    for (NodeId v = 0; v < n; ++v) {
      Degree t = top_lambda_weighted(view.degrees(v), g.weights_of(v), lambda);
      if (li > 0) t = std::min(t, table.at(v, li - 1));
      index[v] = t;
      top = std::max(top, t);
    }
    buckets.assign(std::size_t(top) + 1, {});
    for (NodeId v = n; v-- > 0;) buckets[index[v]].push_back(v);

    auto& out = table.column(li);
    for (Degree k = 0; k <= top; ++k) {
      auto& b = buckets[k];
      while (!b.empty()) {
        NodeId v = b.back();
        b.pop_back();
        if (!view.alive(v) || index[v] != k) continue;
        out[v] = k;
        view.remove_node(v, [&](NodeId u, LayerId) {
          if (index[u] > k && !touched[u]) {
            touched[u] = 1;
            touched_list.push_back(u);
          }
        });
        for (NodeId u : touched_list) {
          touched[u] = 0;
          Degree t = top_lambda_weighted(view.degrees(u), g.weights_of(u), lambda);
          Degree next = std::max(k, std::min(index[u], t));
          if (next != index[u]) {
            index[u] = next;
            buckets[next].push_back(u);
          }
        }
        touched_list.clear();
      }
    }
  }
  return table;
}

// Temporal span-core preset: layer l (in temporal order) gets weight 2^l and
// each λ is the weight of one window of `delta` consecutive layers, so a λ
// identifies its window uniquely.
struct SpanCorePreset {
  MultiplexGraph graph;
  LambdaSet lambdas;
};

inline SpanCorePreset span_core_lambda_set(const MultiplexGraph& g, std::size_t delta) {
  const std::size_t L = g.num_layers();
  if (delta < 1 || delta > L) throw InvalidArgument("span-core Δ must be in [1, |L|]");
  if (L > 52) throw InvalidArgument("span-core preset supports at most 52 layers");
  std::vector<double> w(L);
  for (std::size_t l = 0; l < L; ++l) w[l] = std::ldexp(1.0, int(l));
  std::vector<double> lambdas;
  for (std::size_t start = 0; start + delta <= L; ++start) {
    double s = 0;
    for (std::size_t j = start; j < start + delta; ++j) s += w[j];
    lambdas.push_back(s);
  }
  return {g.with_layer_weights(w), LambdaSet(std::move(lambdas))};
}

}  // namespace sumcore
