#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "sumcore/generators.hpp"
#include "sumcore/oracle.hpp"
#include "sumcore/report.hpp"
#include "sumcore/stats.hpp"
#include "sumcore/sumcore.hpp"

using namespace sumcore;
using report::Json;

namespace {

constexpr int kInputError = 1;
constexpr int kBudget = 2;

struct Common {
  std::string graph;
  std::string weights;
  std::string random;  // N:L:P
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string out;
  unsigned threads = 1;
  std::size_t max_states = 1'000'000;
  double time_limit = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--graph", c.graph, "edge list file: \"layer src dst\" per line");
  cmd->add_option("--weights", c.weights, "weight file: \"node layer weight\" or \"layer weight\" lines");
  cmd->add_option("--random", c.random, "generate a random multiplex graph instead, as N:L:P");
  cmd->add_option("--seed", c.seed, "seed for --random")->capture_default_str();
  cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  cmd->add_option("--out", c.out, "write output here instead of stdout");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-states", c.max_states, "decomposition state budget")->capture_default_str();
  cmd->add_option("--time-limit", c.time_limit, "decomposition time budget in seconds (0 = none)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

template <typename T>
std::vector<T> parse_numbers(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::istringstream ts(tok);
    T x;
    if (!(ts >> x) || !(ts >> std::ws).eof()) throw InvalidArgument(std::string("bad ") + what + " \"" + text + "\"");
    out.push_back(x);
  }
  if (out.empty()) throw InvalidArgument(std::string("empty ") + what);
  return out;
}

std::vector<Degree> parse_degrees(const std::string& text) {
  std::vector<Degree> out;
  for (long long x : parse_numbers<long long>(text, "k vector")) {
    if (x < 0) throw InvalidArgument("k entries must be nonnegative");
    out.push_back(static_cast<Degree>(x));
  }
  return out;
}

struct RandomSpec {
  std::size_t n = 0, layers = 0;
  double p = 0;
};

RandomSpec parse_random(const std::string& text) {
  RandomSpec r;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> r.n >> c1 >> r.layers >> c2 >> r.p) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof() ||
      r.n == 0 || r.layers == 0 || r.p < 0 || r.p > 1)
    throw InvalidArgument("--random expects N:L:P with N, L >= 1 and 0 <= P <= 1");
  return r;
}

void validate_source(const Common& c) {
  if (c.graph.empty() == c.random.empty()) throw InvalidArgument("give exactly one of --graph and --random");
  if (!c.random.empty()) parse_random(c.random);
}

MultiplexGraph load_graph(const Common& c) {
  MultiplexGraph g;
  if (!c.random.empty()) {
    auto r = parse_random(c.random);
    g = gen::random_multiplex(r.n, r.layers, r.p, c.seed);
  } else {
    g = load_edge_list(c.graph);
  }
  if (!c.weights.empty()) g = load_weights(c.weights, g);
  std::clog << "sumcore: graph " << report::graph_summary(g).dump() << '\n';
  return g;
}

LayerId resolve_layer(const MultiplexGraph& g, std::uint64_t original) {
  auto l = g.layer_index(original);
  if (l < 0) throw InvalidArgument("unknown layer id " + std::to_string(original));
  return static_cast<LayerId>(l);
}

Summarizer build_summarizer(const std::string& spec, const MultiplexGraph& g) {
  auto resolve = [&](std::uint64_t x) { return resolve_layer(g, x); };
  if (spec.rfind("stat:@", 0) == 0) {
    std::ifstream in(spec.substr(6));
    if (!in) throw InvalidArgument("cannot open partition spec " + spec.substr(6));
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("partition spec is not valid JSON: ") + e.what());
    }
    PartitionSpec ps;
    try {
      for (const auto& grp : j.at("groups")) {
        std::vector<LayerId> layers;
        for (const auto& l : grp) layers.push_back(resolve(l.get<std::uint64_t>()));
        ps.groups.push_back(std::move(layers));
      }
      for (const auto& f : j.at("families")) ps.families.push_back(parse_family(f.get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("partition spec needs {groups:[[ids]], families:[names]}: ") + e.what());
    }
    return parse_summarizer(spec, g.num_layers(), resolve, &ps);
  }
  return parse_summarizer(spec, g.num_layers(), resolve);
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InvalidArgument("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void emit_json(const Common& c, const Json& j) {
  Output o(c.out);
  o.stream() << j.dump(2) << '\n';
}

// ---- subcommands ----

struct DecomposeArgs {
  std::string summarizer;
  bool membership = false;
};

int run_decompose(const Common& c, const DecomposeArgs& a) {
  check_summarizer_syntax(a.summarizer);
  validate_source(c);
  auto g = load_graph(c);
  auto s = build_summarizer(a.summarizer, g);
  auto lat = decompose(g, s, {c.max_states, c.time_limit, c.threads});
  std::clog << "sumcore: " << lat.size() << " cores, " << lat.states_explored() << " states, "
            << (lat.complete() ? "complete" : "truncated") << '\n';
  if (c.format == "csv") {
    Output o(c.out);
    report::lattice_csv(o.stream(), g, lat);
  } else {
    emit_json(c, report::lattice_json(g, lat));
  }
  return lat.complete() ? 0 : kBudget;
}

struct WcoreArgs {
  std::string lambda_set;
  std::size_t span_core = 0;
  std::optional<long long> k;
};

int run_wfirmcore(const Common& c, const WcoreArgs& a) {
  if (a.lambda_set.empty() == (a.span_core == 0)) throw InvalidArgument("give exactly one of --lambda-set and --span-core");
  std::vector<double> lambdas;
  if (!a.lambda_set.empty()) {
    lambdas = parse_numbers<double>(a.lambda_set, "λ set");
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  }
  if (a.k && *a.k < 0) throw InvalidArgument("--k must be nonnegative");
  validate_source(c);
  auto g = load_graph(c);
  std::optional<LambdaSet> set;
  if (a.span_core) {
    auto preset = span_core_lambda_set(g, a.span_core);
    g = std::move(preset.graph);
    set = std::move(preset.lambdas);
  } else {
    set = LambdaSet(lambdas);
  }
  auto table = wfirmcore_decompose(g, *set);
  if (c.format == "csv") {
    Output o(c.out);
    report::wcore_csv(o.stream(), g, table);
    return 0;
  }
  auto j = report::wcore_json(g, table);
  if (a.k) {
    Json kept = Json::array();
    for (std::size_t i = 0; i < set->size(); ++i) {
      auto members = table.core(static_cast<Degree>(*a.k), i);
      kept.push_back({{"lambda", (*set)[i]}, {"scv", *a.k}, {"size", members.size()}, {"members", report::ids(g, members)}});
    }
    j["cores"] = std::move(kept);
  }
  emit_json(c, j);
  return 0;
}

struct DensestArgs {
  std::optional<std::size_t> alpha;
  double beta = 1.0;
  std::string density = "new";
  bool min_product = false;
  bool global_phi = false;
  std::size_t candidate_cap = 10'000;
  bool guarantee = true;
};

int run_densest(const Common& c, const DensestArgs& a) {
  if (!(a.beta > 0)) throw InvalidArgument("--beta must be positive");
  validate_source(c);
  auto g = load_graph(c);
  std::size_t alpha = a.alpha.value_or(std::min<std::size_t>(g.num_layers(), 10));
  ApproxOptions opt;
  opt.density.beta = a.beta;
  opt.density.form = a.min_product ? TermForm::min_product : TermForm::top_lambda;
  if (a.global_phi) {
    opt.density.phi = PhiMode::global;
    opt.density.global_phi = global_phi(g, a.candidate_cap);
  }
  opt.objective = a.density == "ml" ? Objective::ml : a.density == "edge" ? Objective::edge : Objective::new_density;
  opt.candidate_cap = a.candidate_cap;
  opt.threads = c.threads;
  auto r = wfc_approx(g, alpha, opt);
  if (r.truncated) std::clog << "sumcore: λ candidate cap reached; result is over a truncated candidate set\n";
  if (c.format == "csv") {
    Output o(c.out);
    report::density_terms_csv(o.stream(), g, r);
    return 0;
  }
  auto j = report::density_json(g, r);
  j["alpha"] = alpha;
  j["objective"] = a.density;
  j["form"] = a.min_product ? "min_product" : "top_lambda";
  j["phi"] = a.global_phi ? "global" : "per_node";
  if (a.guarantee) j["guarantee"] = report::guarantee_json(g, guarantee_constants(g, alpha, a.beta));
  emit_json(c, j);
  return 0;
}

struct EngagementArgs {
  std::string k;
  bool tau = false;
  std::string summarizer = "top:1";
  std::string departures;
  std::size_t bins = 5;
  std::string curve_out;
};

int run_engagement(const Common& c, const EngagementArgs& a) {
  auto k = parse_degrees(a.k);
  check_summarizer_syntax(a.summarizer);
  if (a.bins == 0) throw InvalidArgument("--bins must be positive");
  validate_source(c);
  auto g = load_graph(c);
  if (k.size() != g.num_layers())
    throw InvalidArgument("--k has " + std::to_string(k.size()) + " entries, graph has " +
                          std::to_string(g.num_layers()) + " layers");
  auto profile = max_equilibrium(g, k);
  std::optional<std::vector<double>> tau;
  bool complete = true;
  if (a.tau || !a.departures.empty()) {
    auto s = build_summarizer(a.summarizer, g);
    auto lat = decompose(g, s, {c.max_states, c.time_limit, c.threads});
    if (!lat.complete()) {
      std::clog << "sumcore: decomposition budget exhausted; τ is unavailable\n";
      complete = false;
    } else {
      tau = engagement_scores(lat, g.num_nodes());
    }
  }
  std::vector<DepartureBin> bins;
  if (!a.departures.empty() && tau) {
    std::ifstream in(a.departures);
    if (!in) throw InvalidArgument("cannot open " + a.departures);
    auto labels = parse_departures(in, g);
    bins = departure_curve(*tau, labels, a.bins);
  }
  const std::vector<double>* tp = tau ? &*tau : nullptr;
  if (c.format == "csv") {
    Output o(c.out);
    report::engagement_csv(o.stream(), g, profile, tp);
    if (!a.departures.empty()) {
      if (!a.curve_out.empty()) {
        Output co(a.curve_out);
        report::departure_csv(co.stream(), bins);
      } else {
        o.stream() << '\n';
        report::departure_csv(o.stream(), bins);
      }
    }
  } else {
    auto j = report::engagement_json(g, k, profile, tp, bins);
    j["complete"] = complete;
    emit_json(c, j);
  }
  return complete ? 0 : kBudget;
}

struct OracleArgs {
  std::string kind = "core";
  std::string summarizer = "identity";
  std::string k;
  double lambda = 1;
  double beta = 1;
  std::size_t max_nodes = 14;
};

int run_oracle(const Common& c, const OracleArgs& a) {
  std::vector<double> kv;
  if (a.kind != "densest") {
    if (a.k.empty()) throw InvalidArgument("--k is required for oracle " + a.kind);
    kv = parse_numbers<double>(a.k, "k vector");
  }
  if (a.kind == "core") check_summarizer_syntax(a.summarizer);
  if (a.kind == "wcore" && (kv.size() != 1 || kv[0] < 0 || kv[0] != std::floor(kv[0])))
    throw InvalidArgument("oracle wcore takes a single nonnegative integer --k");
  validate_source(c);
  auto g = load_graph(c);
  oracle::OracleBudget budget;
  budget.max_nodes = a.max_nodes;
  budget.max_subsets = a.max_nodes >= 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << a.max_nodes);
  Json j;
  j["kind"] = a.kind;
  if (a.kind == "core") {
    auto s = build_summarizer(a.summarizer, g);
    auto members = oracle::brute_core(g, s, ScvIndex(kv), budget);
    j["summarizer"] = s.name();
    j["k"] = kv;
    j["members"] = report::ids(g, members);
  } else if (a.kind == "wcore") {
    auto members = oracle::brute_wcore(g, static_cast<Degree>(kv[0]), a.lambda, budget);
    j["k"] = kv[0];
    j["lambda"] = a.lambda;
    j["members"] = report::ids(g, members);
  } else {
    auto r = oracle::brute_densest(g, a.beta, budget);
    j["beta"] = a.beta;
    j["subset"] = report::ids(g, r.subset);
    j["density"] = r.density;
  }
  emit_json(c, j);
  return 0;
}

int run_stats(const Common& c) {
  validate_source(c);
  auto g = load_graph(c);
  auto stats = layer_stats(g);
  if (c.format == "csv") {
    Output o(c.out);
    o.stream() << "layer,edges,mean_degree,variance,tail_exponent\n";
    for (const auto& s : stats)
      o.stream() << g.original_layer_id(s.layer) << ',' << s.edges << ',' << report::real(s.mean_degree) << ','
                 << report::real(s.variance) << ',' << (s.tail_exponent ? report::real(*s.tail_exponent) : "")
                 << '\n';
    return 0;
  }
  Json j;
  j["graph"] = report::graph_summary(g);
  Json layers = Json::array();
  for (const auto& s : stats)
    layers.push_back({{"layer", g.original_layer_id(s.layer)},
                      {"edges", s.edges},
                      {"mean_degree", s.mean_degree},
                      {"variance", s.variance},
                      {"tail_exponent", s.tail_exponent ? Json(*s.tail_exponent) : Json(nullptr)}});
  j["layers"] = std::move(layers);
  emit_json(c, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Summarized-core decomposition, multiplex densest subgraph and engagement scoring"};
  app.name("sumcore");
  app.require_subcommand(1);

  Common common;

  DecomposeArgs dec;
  auto* c_dec = app.add_subcommand("decompose", "enumerate every distinct S-core and the skyline");
  add_common(c_dec, common);
  c_dec->add_option("--summarizer", dec.summarizer,
                    "identity | sum | wsum | minmax | top:λ | wtop:λ | subset:l1,l2 | order:r1,r2 | stat:@spec.json")
      ->required();

  WcoreArgs wc;
  auto* c_wc = app.add_subcommand("wfirmcore", "Wcore index of every node for a set of λ values");
  add_common(c_wc, common);
  auto* o_ls = c_wc->add_option("--lambda-set", wc.lambda_set, "comma-separated λ values, e.g. 1,2,11,20");
  auto* o_sc = c_wc->add_option("--span-core", wc.span_core, "temporal preset with window length Δ");
  o_ls->excludes(o_sc);
  c_wc->add_option("--k", wc.k, "report only the (k, λ)-cores for this k");

  DensestArgs den;
  auto* c_den = app.add_subcommand("densest", "approximate multiplex densest subgraph");
  add_common(c_den, common);
  c_den->add_option("--alpha", den.alpha, "max layers per λ candidate (default min(|L|, 10))");
  c_den->add_option("--beta", den.beta, "layer-count reward exponent")->capture_default_str();
  c_den->add_option("--density", den.density, "objective used to rank candidate cores")
      ->check(CLI::IsMember({"new", "ml", "edge"}))
      ->capture_default_str();
  c_den->add_flag("--min-product", den.min_product, "use min(deg*w) * (Σw)^β per node instead of Top-λ");
  c_den->add_flag("--global-phi", den.global_phi, "draw λ from all nodes' weight sums instead of each node's own");
  c_den->add_option("--candidate-cap", den.candidate_cap, "maximum number of λ candidates")->capture_default_str();
  c_den->add_flag("!--no-guarantee", den.guarantee, "skip the guarantee constants");

  EngagementArgs eng;
  auto* c_eng = app.add_subcommand("engagement", "maximal equilibrium, τ scores and departure curve");
  add_common(c_eng, common);
  c_eng->add_option("--k", eng.k, "per-layer thresholds, e.g. 1,1")->required();
  c_eng->add_flag("--tau", eng.tau, "compute τ from the S-core lattice");
  c_eng->add_option("--summarizer", eng.summarizer, "summarizer for τ")->capture_default_str();
  c_eng->add_option("--departures", eng.departures, "CSV of node,departed{0,1}");
  c_eng->add_option("--bins", eng.bins, "number of τ buckets")->capture_default_str();
  c_eng->add_option("--curve-out", eng.curve_out, "write the departure curve CSV here");

  OracleArgs orc;
  auto* c_orc = app.add_subcommand("oracle", "brute-force reference results (small graphs only)");
  add_common(c_orc, common);
  c_orc->add_option("--kind", orc.kind, "which oracle")
      ->check(CLI::IsMember({"core", "wcore", "densest"}))
      ->capture_default_str();
  c_orc->add_option("--summarizer", orc.summarizer, "summarizer for --kind core")->capture_default_str();
  c_orc->add_option("--k", orc.k, "threshold vector (core) or integer k (wcore)");
  c_orc->add_option("--lambda", orc.lambda, "λ for --kind wcore")->capture_default_str();
  c_orc->add_option("--beta", orc.beta, "β for --kind densest")->capture_default_str();
  c_orc->add_option("--max-nodes", orc.max_nodes, "enumeration budget")->capture_default_str();

  auto* c_stats = app.add_subcommand("stats", "per-layer degree distribution summaries");
  add_common(c_stats, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (c_dec->parsed()) return run_decompose(common, dec);
    if (c_wc->parsed()) return run_wfirmcore(common, wc);
    if (c_den->parsed()) return run_densest(common, den);
    if (c_eng->parsed()) return run_engagement(common, eng);
    if (c_orc->parsed()) return run_oracle(common, orc);
    if (c_stats->parsed()) return run_stats(common);
  } catch (const BudgetExceeded& e) {
    std::cerr << "sumcore: " << e.what() << '\n';
    return kBudget;
  } catch (const Error& e) {
    std::cerr << "sumcore: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
