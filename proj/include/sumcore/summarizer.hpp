#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sumcore/common.hpp"

namespace sumcore {

// Largest k such that the layers where deg >= k carry total weight at least
// lambda. lambda == 0 still requires one qualifying layer, so it yields the
// largest degree entry. Returns 0 when no k qualifies.
inline Degree top_lambda_weighted(std::span<const Degree> deg, std::span<const double> w, double lambda) {
  const std::size_t L = deg.size();
  if (L == 0) return 0;
  // Small |L|: insertion sort of layer indices by degree, descending.
  constexpr std::size_t kStack = 32;
  std::uint32_t stack_idx[kStack];
  std::vector<std::uint32_t> heap_idx;
  std::uint32_t* idx = stack_idx;
  if (L > kStack) {
    heap_idx.resize(L);
    idx = heap_idx.data();
  }
  for (std::uint32_t i = 0; i < L; ++i) {
    std::uint32_t j = i;
    while (j > 0 && deg[idx[j - 1]] < deg[i]) {
      idx[j] = idx[j - 1];
      --j;
    }
    idx[j] = i;
  }
  double cum = 0;
  for (std::size_t j = 0; j < L; ++j) {
    cum += w[idx[j]];
    // all layers tied at this degree must be counted before testing
    if (j + 1 < L && deg[idx[j + 1]] == deg[idx[j]]) continue;
    if (cum >= lambda - kTolerance) return deg[idx[j]];
  }
  return 0;
}

// Unweighted rank statistic: the r-th largest entry (r is 1-based).
inline Degree kth_largest(std::span<const Degree> deg, std::size_t r) {
  constexpr std::size_t kStack = 32;
  Degree buf[kStack] = {};
  std::vector<Degree> heap;
  Degree* b = buf;
  if (deg.size() > kStack) {
    heap.resize(deg.size());
    b = heap.data();
  }
  std::copy(deg.begin(), deg.end(), b);
  std::nth_element(b, b + (r - 1), b + deg.size(), std::greater<>());
  return b[r - 1];
}

enum class Family { poisson_binomial, uniform, powerlaw, exponential };

inline Family parse_family(std::string_view name) {
  if (name == "poisson_binomial") return Family::poisson_binomial;
  if (name == "uniform") return Family::uniform;
  if (name == "powerlaw") return Family::powerlaw;
  if (name == "exponential") return Family::exponential;
  throw InvalidArgument("unknown distribution family \"" + std::string(name) + "\"");
}

inline const char* family_name(Family f) {
  switch (f) {
    case Family::poisson_binomial: return "poisson_binomial";
    case Family::uniform: return "uniform";
    case Family::powerlaw: return "powerlaw";
    case Family::exponential: return "exponential";
  }
  return "?";
}

// A partition of the layers into groups that share a degree distribution family.
// Each group is summarized by its family's minimal sufficient statistic:
// sum for poisson_binomial and exponential, max for uniform, and
// sum of ln(1 + deg) for powerlaw (the +1 keeps zero degrees finite).
struct PartitionSpec {
  std::vector<std::vector<LayerId>> groups;
  std::vector<Family> families;
};

// Pure, monotone map from (degree vector, node weights) to R>=0^d.
class Summarizer {
 public:
  enum class Kind { identity, top_lambda, subset, sum, wsum, minmax, order_stats, stat, wtop_lambda };

  static Summarizer identity(std::size_t num_layers) {
    Summarizer s(Kind::identity, num_layers);
    s.d_ = num_layers;
    return s;
  }
  static Summarizer top_lambda(std::size_t lambda, std::size_t num_layers) {
    if (lambda < 1 || lambda > num_layers)
      throw InvalidArgument("λ out of range: top:" + std::to_string(lambda) + " needs 1 <= λ <= " +
                            std::to_string(num_layers));
    Summarizer s(Kind::top_lambda, num_layers);
    s.ranks_ = {lambda};
    s.d_ = 1;
    return s;
  }
  static Summarizer subset(std::vector<LayerId> layers, std::size_t num_layers) {
    if (layers.empty()) throw InvalidArgument("subset summarizer needs at least one layer");
    for (LayerId l : layers)
      if (l >= num_layers) throw InvalidArgument("subset layer " + std::to_string(l) + " out of range");
    Summarizer s(Kind::subset, num_layers);
    s.d_ = layers.size();
    s.layers_ = std::move(layers);
    return s;
  }
  static Summarizer sum(std::size_t num_layers) {
    Summarizer s(Kind::sum, num_layers);
    s.d_ = 1;
    return s;
  }
  static Summarizer wsum(std::size_t num_layers) {
    Summarizer s(Kind::wsum, num_layers);
    s.d_ = 1;
    return s;
  }
  static Summarizer minmax(std::size_t num_layers) {
    Summarizer s(Kind::minmax, num_layers);
    s.d_ = 2;
    return s;
  }
  static Summarizer order_stats(std::vector<std::size_t> ranks, std::size_t num_layers) {
    if (ranks.empty()) throw InvalidArgument("order summarizer needs at least one rank");
    for (auto r : ranks)
      if (r < 1 || r > num_layers)
        throw InvalidArgument("λ out of range: order rank " + std::to_string(r) + " needs 1 <= λ <= " +
                              std::to_string(num_layers));
    Summarizer s(Kind::order_stats, num_layers);
    s.d_ = ranks.size();
    s.ranks_ = std::move(ranks);
    return s;
  }
  static Summarizer stat(PartitionSpec spec, std::size_t num_layers) {
    if (spec.groups.empty() || spec.groups.size() != spec.families.size())
      throw InvalidArgument("partition spec needs one family per group");
    std::vector<int> seen(num_layers, 0);
    for (const auto& g : spec.groups) {
      if (g.empty()) throw InvalidArgument("partition spec has an empty group");
      for (LayerId l : g) {
        if (l >= num_layers) throw InvalidArgument("partition layer " + std::to_string(l) + " out of range");
        if (seen[l]++) throw InvalidArgument("layer " + std::to_string(l) + " appears in two groups");
      }
    }
    for (std::size_t l = 0; l < num_layers; ++l)
      if (!seen[l]) throw InvalidArgument("incomplete partition: layer " + std::to_string(l) + " missing");
    Summarizer s(Kind::stat, num_layers);
    s.d_ = spec.groups.size();
    s.spec_ = std::move(spec);
    return s;
  }
  static Summarizer wtop_lambda(double lambda, std::size_t num_layers) {
    if (!(lambda >= 0) || !std::isfinite(lambda)) throw InvalidArgument("wtop λ must be a nonnegative real");
    Summarizer s(Kind::wtop_lambda, num_layers);
    s.lambda_ = lambda;
    s.d_ = 1;
    return s;
  }

  Kind kind() const { return kind_; }
  std::size_t dims() const { return d_; }
  std::size_t num_layers() const { return L_; }

  // True when every output is an integer for integer degree input.
  bool integer_valued() const {
    if (kind_ == Kind::wsum) return false;
    if (kind_ == Kind::stat)
      return std::none_of(spec_.families.begin(), spec_.families.end(),
                          [](Family f) { return f == Family::powerlaw; });
    return true;
  }

  // Writes S(deg, w) into out (size dims()).
  void eval(std::span<const Degree> deg, std::span<const double> w, std::span<double> out) const {
    if (deg.size() != L_ || w.size() != L_ || out.size() != d_)
      throw InvalidArgument("summarizer dimension mismatch");
    switch (kind_) {
      case Kind::identity:
        for (std::size_t l = 0; l < L_; ++l) out[l] = deg[l];
        break;
      case Kind::top_lambda:
        out[0] = kth_largest(deg, ranks_[0]);
        break;
      case Kind::subset:
        for (std::size_t i = 0; i < d_; ++i) out[i] = deg[layers_[i]];
        break;
      case Kind::sum: {
        std::uint64_t s = 0;
        for (auto x : deg) s += x;
        out[0] = static_cast<double>(s);
        break;
      }
      case Kind::wsum: {
        double s = 0;
        for (std::size_t l = 0; l < L_; ++l) s += w[l] * deg[l];
        out[0] = s;
        break;
      }
      case Kind::minmax: {
        auto [lo, hi] = std::minmax_element(deg.begin(), deg.end());
        out[0] = *lo;
        out[1] = *hi;
        break;
      }
      case Kind::order_stats:
        for (std::size_t i = 0; i < d_; ++i) out[i] = kth_largest(deg, ranks_[i]);
        break;
      case Kind::stat:
        for (std::size_t i = 0; i < d_; ++i) {
          double acc = 0;
          for (LayerId l : spec_.groups[i]) {
            switch (spec_.families[i]) {
              case Family::poisson_binomial:
              case Family::exponential: acc += deg[l]; break;
              case Family::uniform: acc = std::max(acc, double(deg[l])); break;
              case Family::powerlaw: acc += std::log1p(double(deg[l])); break;
            }
          }
          out[i] = acc;
        }
        break;
      case Kind::wtop_lambda:
        out[0] = top_lambda_weighted(deg, w, lambda_);
        break;
    }
  }

  std::vector<double> eval(std::span<const Degree> deg, std::span<const double> w) const {
    std::vector<double> out(d_);
    eval(deg, w, out);
    return out;
  }

  // Unit weights.
  std::vector<double> eval(std::span<const Degree> deg) const {
    std::vector<double> w(deg.size(), 1.0);
    return eval(deg, w);
  }

  // Canonical text form. Everything except stat round-trips through parse_summarizer.
  std::string name() const {
    auto join = [](const auto& xs) {
      std::string s;
      for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
      return s;
    };
    switch (kind_) {
      case Kind::identity: return "identity";
      case Kind::top_lambda: return "top:" + std::to_string(ranks_[0]);
      case Kind::subset: return "subset:" + join(layers_);
      case Kind::sum: return "sum";
      case Kind::wsum: return "wsum";
      case Kind::minmax: return "minmax";
      case Kind::order_stats: return "order:" + join(ranks_);
      case Kind::stat: {
        std::string s = "stat:";
        for (std::size_t i = 0; i < spec_.groups.size(); ++i)
          s += (i ? ";" : "") + std::string(family_name(spec_.families[i])) + "(" + join(spec_.groups[i]) + ")";
        return s;
      }
      case Kind::wtop_lambda: {
        std::string v = std::to_string(lambda_);
        v.erase(v.find_last_not_of('0') + 1);
        if (!v.empty() && v.back() == '.') v.pop_back();
        return "wtop:" + v;
      }
    }
    return "?";
  }

  double lambda() const { return lambda_; }
  const std::vector<LayerId>& layers() const { return layers_; }
  const std::vector<std::size_t>& ranks() const { return ranks_; }
  const PartitionSpec& partition() const { return spec_; }

 private:
  Summarizer(Kind k, std::size_t L) : kind_(k), L_(L) {}

  Kind kind_;
  std::size_t L_;
  std::size_t d_ = 1;
  std::vector<std::size_t> ranks_;
  std::vector<LayerId> layers_;
  PartitionSpec spec_;
  double lambda_ = 0;
};

inline Summarizer make_stat_summarizer(PartitionSpec spec, std::size_t num_layers) {
  return Summarizer::stat(std::move(spec), num_layers);
}

inline Summarizer make_order_stat_summarizer(std::vector<std::size_t> ranks, std::size_t num_layers) {
  return Summarizer::order_stats(std::move(ranks), num_layers);
}

namespace detail {

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view what) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    auto tok = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    std::string t(tok);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
      throw InvalidArgument("bad " + std::string(what) + " list \"" + std::string(text) + "\"");
    out.push_back(static_cast<T>(std::stoull(t)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

// Layer-id resolver used while parsing: maps a file-level layer id to a dense id.
using LayerResolver = std::function<LayerId(std::uint64_t)>;

// Parses the CLI grammar: identity | sum | wsum | minmax | top:λ | wtop:λ |
// subset:l1,l2 | order:r1,r2. "stat:" specs are loaded from JSON by the caller
// and passed in as `stat_spec`.
inline Summarizer parse_summarizer(std::string_view text, std::size_t num_layers,
                                   const LayerResolver& resolve = {}, const PartitionSpec* stat_spec = nullptr) {
  auto colon = text.find(':');
  std::string_view head = text.substr(0, colon);
  std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) throw InvalidArgument("summarizer \"" + std::string(text) + "\" needs an argument");
  };
  if (head == "identity") return Summarizer::identity(num_layers);
  if (head == "sum") return Summarizer::sum(num_layers);
  if (head == "wsum") return Summarizer::wsum(num_layers);
  if (head == "minmax") return Summarizer::minmax(num_layers);
  if (head == "top") {
    need_arg();
    auto v = detail::parse_list<std::size_t>(arg, "top");
    if (v.size() != 1) throw InvalidArgument("top takes a single λ");
    return Summarizer::top_lambda(v[0], num_layers);
  }
  if (head == "wtop") {
    need_arg();
    double lam = 0;
    try {
      std::size_t used = 0;
      lam = std::stod(std::string(arg), &used);
      if (used != arg.size()) throw std::invalid_argument("trailing");
    } catch (...) {
      throw InvalidArgument("bad wtop λ \"" + std::string(arg) + "\"");
    }
    return Summarizer::wtop_lambda(lam, num_layers);
  }
  if (head == "subset") {
    need_arg();
    auto raw = detail::parse_list<std::uint64_t>(arg, "subset");
    std::vector<LayerId> layers;
    for (auto r : raw) layers.push_back(resolve ? resolve(r) : static_cast<LayerId>(r));
    return Summarizer::subset(std::move(layers), num_layers);
  }
  if (head == "order") {
    need_arg();
    return Summarizer::order_stats(detail::parse_list<std::size_t>(arg, "order"), num_layers);
  }
  if (head == "stat") {
    if (!stat_spec) throw InvalidArgument("stat summarizer needs a partition spec (stat:@spec.json)");
    return Summarizer::stat(*stat_spec, num_layers);
  }
  throw InvalidArgument("unknown summarizer \"" + std::string(text) + "\"");
}

// Syntax-only check, usable before the graph (and so |L|) is known.
inline void check_summarizer_syntax(std::string_view text) {
  static const char* plain[] = {"identity", "sum", "wsum", "minmax"};
  for (auto p : plain)
    if (text == p) return;
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon + 1 == text.size())
    throw InvalidArgument("unknown summarizer \"" + std::string(text) + "\"");
  auto head = text.substr(0, colon);
  if (head == "top" || head == "subset" || head == "order") {
    detail::parse_list<std::uint64_t>(text.substr(colon + 1), head);
    return;
  }
  if (head == "wtop" || head == "stat") return;
  throw InvalidArgument("unknown summarizer \"" + std::string(text) + "\"");
}

}  // namespace sumcore
