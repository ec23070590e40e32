#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "sumcore/graph.hpp"

namespace sumcore {

// Degree-distribution summary of one layer, to help pick a distribution family
// per layer group.
struct LayerStats {
  LayerId layer = 0;
  std::size_t edges = 0;
  double mean_degree = 0;
  double variance = 0;
  std::optional<double> tail_exponent;  // power-law MLE over positive degrees
};

// Discrete power-law exponent by the continuous approximation with x_min = 1:
// alpha = 1 + m / sum ln(x / (x_min - 1/2)).
inline std::optional<double> powerlaw_exponent(const std::vector<Degree>& degrees) {
  double s = 0;
  std::size_t m = 0;
  for (Degree d : degrees)
    if (d >= 1) s += std::log(double(d) / 0.5), ++m;
  if (m == 0 || s <= 0) return std::nullopt;
  return 1.0 + double(m) / s;
}

inline std::vector<LayerStats> layer_stats(const MultiplexGraph& g) {
  std::vector<LayerStats> out;
  const std::size_t n = g.num_nodes();
  for (LayerId l = 0; l < g.num_layers(); ++l) {
    LayerStats st;
    st.layer = l;
    st.edges = g.num_edges(l);
    std::vector<Degree> deg(n);
    double sum = 0, sq = 0;
    for (NodeId v = 0; v < n; ++v) {
      deg[v] = g.degree(l, v);
      sum += deg[v];
      sq += double(deg[v]) * deg[v];
    }
    if (n) {
      st.mean_degree = sum / double(n);
      st.variance = sq / double(n) - st.mean_degree * st.mean_degree;
    }
    st.tail_exponent = powerlaw_exponent(deg);
    out.push_back(st);
  }
  return out;
}

}  // namespace sumcore
