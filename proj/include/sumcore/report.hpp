#pragma once

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sumcore/core_engine.hpp"
#include "sumcore/densest.hpp"
#include "sumcore/engagement.hpp"
#include "sumcore/graph.hpp"
#include "sumcore/wfirmcore.hpp"

// JSON and CSV renderings of library results. Node and layer ids are written
// as the original file ids.
namespace sumcore::report {

using Json = nlohmann::ordered_json;

// Shortest round-trip text for a real; integral values print without a point.
inline std::string real(double x) {
  if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 1e15) return std::to_string(static_cast<long long>(x));
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline Json ids(const MultiplexGraph& g, std::span<const NodeId> set) {
  Json a = Json::array();
  for (NodeId v : set) a.push_back(g.original_node_id(v));
  return a;
}

inline Json graph_summary(const MultiplexGraph& g) {
  Json j;
  j["nodes"] = g.num_nodes();
  j["layers"] = g.num_layers();
  j["edges"] = g.num_edges();
  j["dedup_dropped"] = g.dedup_dropped();
  return j;
}

inline Json lattice_json(const MultiplexGraph& g, const CoreLattice& lat) {
  Json j;
  j["summarizer"] = lat.summarizer();
  j["dims"] = lat.dims();
  j["complete"] = lat.complete();
  j["states_explored"] = lat.states_explored();
  Json cores = Json::array();
  for (const auto& [key, core] : lat.cores()) {
    Json c;
    c["scv"] = core.scv.values;
    c["size"] = core.members.size();
    c["members"] = ids(g, core.members);
    Json parents = Json::array();
    for (const auto& p : core.parents) parents.push_back(p.values);
    c["parents"] = parents;
    cores.push_back(std::move(c));
  }
  j["cores"] = std::move(cores);
  if (lat.complete()) {
    Json sky = Json::array();
    for (const auto& s : lat.skyline()) sky.push_back(s.values);
    j["skyline"] = std::move(sky);
  } else {
    j["skyline"] = nullptr;
  }
  return j;
}

// One row per (node, core containing it): node,scv_0,...,scv_{d-1}.
inline void lattice_csv(std::ostream& out, const MultiplexGraph& g, const CoreLattice& lat) {
  out << "node";
  for (std::size_t i = 0; i < lat.dims(); ++i) out << ",scv_" << i;
  out << '\n';
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    for (const Core* c : lat.cores_containing(v)) {
      out << g.original_node_id(v);
      for (double x : c->scv.values) out << ',' << real(x);
      out << '\n';
    }
}

inline void wcore_csv(std::ostream& out, const MultiplexGraph& g, const WcoreTable& t) {
  out << "node,lambda,wcore\n";
  for (std::size_t i = 0; i < t.lambdas().size(); ++i)
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      out << g.original_node_id(v) << ',' << real(t.lambdas()[i]) << ',' << t.at(v, i) << '\n';
}

// Every distinct (k, λ)-WFirmCore, k ranging over the Wcore values present.
inline Json wcore_json(const MultiplexGraph& g, const WcoreTable& t) {
  Json j;
  j["lambdas"] = t.lambdas().values();
  Json cores = Json::array();
  for (std::size_t i = 0; i < t.lambdas().size(); ++i) {
    std::vector<Degree> ks(t.column(i).begin(), t.column(i).end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (Degree k : ks) {
      auto members = t.core(k, i);
      Json c;
      c["lambda"] = t.lambdas()[i];
      c["scv"] = k;
      c["size"] = members.size();
      c["members"] = ids(g, members);
      cores.push_back(std::move(c));
    }
  }
  j["cores"] = std::move(cores);
  return j;
}

inline Json guarantee_json(const MultiplexGraph& g, const GuaranteeConstants& c) {
  Json j;
  j["omega"] = c.omega;
  j["mu_star"] = c.mu_star;
  j["mu_star_exact"] = c.mu_star_exact;
  j["psi"] = c.psi;
  j["factor"] = c.factor;
  j["densest_layer"] = g.num_layers() ? Json(g.original_layer_id(c.densest_layer)) : Json(nullptr);
  j["single_layer_density"] = c.single_layer_density;
  return j;
}

inline Json density_json(const MultiplexGraph& g, const DensityReport& r) {
  Json j;
  j["subset"] = ids(g, r.subset);
  j["size"] = r.subset.size();
  j["rho_new"] = r.rho_new;
  j["rho_ml"] = r.rho_ml;
  j["rho_edge"] = r.rho_edge ? Json(*r.rho_edge) : Json(nullptr);
  j["beta"] = r.beta;
  j["lambda"] = r.lambda;
  j["k"] = r.k;
  j["candidates"] = r.candidates;
  j["truncated"] = r.truncated;
  Json terms = Json::array();
  for (const auto& [v, t] : r.per_node_terms)
    terms.push_back({{"node", g.original_node_id(v)}, {"best_lambda", t.best_lambda}, {"value", t.value}});
  j["per_node_terms"] = std::move(terms);
  return j;
}

inline void density_terms_csv(std::ostream& out, const MultiplexGraph& g, const DensityReport& r) {
  out << "node,best_lambda,value\n";
  for (const auto& [v, t] : r.per_node_terms)
    out << g.original_node_id(v) << ',' << real(t.best_lambda) << ',' << real(t.value) << '\n';
}

// Layers a node engages in, as ';'-separated original layer ids.
inline std::string engaged_layers(const MultiplexGraph& g, const StrategyProfile& p, NodeId v) {
  std::string s;
  for (LayerId l = 0; l < g.num_layers(); ++l)
    if (p.engaged(v, l)) {
      if (!s.empty()) s += ';';
      s += std::to_string(g.original_layer_id(l));
    }
  return s;
}

inline void engagement_csv(std::ostream& out, const MultiplexGraph& g, const StrategyProfile& p,
                           const std::vector<double>* tau) {
  out << "node,tau,engaged_layers\n";
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    out << g.original_node_id(v) << ',' << (tau ? real((*tau)[v]) : std::string()) << ','
        << engaged_layers(g, p, v) << '\n';
}

inline std::string bucket_label(const DepartureBin& b) { return real(b.tau_lo) + "-" + real(b.tau_hi); }

inline void departure_csv(std::ostream& out, std::span<const DepartureBin> bins) {
  out << "tau_bucket,departure_rate\n";
  for (const auto& b : bins) out << bucket_label(b) << ',' << real(b.rate()) << '\n';
}

inline Json engagement_json(const MultiplexGraph& g, std::span<const Degree> k, const StrategyProfile& p,
                            const std::vector<double>* tau, std::span<const DepartureBin> bins) {
  Json j;
  j["k"] = std::vector<Degree>(k.begin(), k.end());
  j["engaged"] = ids(g, p.engaged_nodes());
  j["equilibrium"] = bool(is_equilibrium(g, p, k));
  Json nodes = Json::array();
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    Json n;
    n["node"] = g.original_node_id(v);
    n["tau"] = tau ? Json((*tau)[v]) : Json(nullptr);
    Json layers = Json::array();
    for (LayerId l = 0; l < g.num_layers(); ++l)
      if (p.engaged(v, l)) layers.push_back(g.original_layer_id(l));
    n["engaged_layers"] = std::move(layers);
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  Json curve = Json::array();
  for (const auto& b : bins)
    curve.push_back({{"tau_lo", b.tau_lo}, {"tau_hi", b.tau_hi}, {"nodes", b.nodes}, {"departed", b.departed},
                     {"departure_rate", b.rate()}});
  j["departure_curve"] = std::move(curve);
  return j;
}

}  // namespace sumcore::report
