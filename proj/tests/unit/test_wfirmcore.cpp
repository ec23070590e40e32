#include <gtest/gtest.h>

#include "support.hpp"

using namespace sumcore;
using namespace testing_support;

namespace {

using Ids = std::vector<std::uint64_t>;

std::vector<Degree> column_by_id(const MultiplexGraph& g, const WcoreTable& t, std::size_t li) {
  std::vector<Degree> out;
  for (std::uint64_t id = 1; id <= 4; ++id) out.push_back(t.at(static_cast<NodeId>(g.node_index(id)), li));
  return out;
}

}  // namespace

TEST(LambdaSet, Validation) {
  EXPECT_THROW(LambdaSet(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(LambdaSet({2, 1}), InvalidArgument);
  EXPECT_THROW(LambdaSet({1, 1}), InvalidArgument);
  EXPECT_THROW(LambdaSet({-1}), InvalidArgument);
  EXPECT_NO_THROW(LambdaSet({0, 1.5, 11}));
}

TEST(WFirmCore, ToyGraphSingleCores) {
  auto g = g1();
  EXPECT_EQ(orig(g, wfirmcore_at(g, 2, 1)), (Ids{1, 2, 3}));
  EXPECT_EQ(orig(g, wfirmcore_at(g, 1, 2)), (Ids{1, 2, 3, 4}));
  EXPECT_EQ(wfirmcore_at(g, 0, 2).size(), 4u);
  EXPECT_TRUE(wfirmcore_at(g, 1, 3).empty());
}

TEST(WFirmCore, ToyGraphDecomposition) {
  auto g = g1();
  auto t = wfirmcore_decompose(g, LambdaSet({1, 2}));
  EXPECT_EQ(column_by_id(g, t, 0), (std::vector<Degree>{2, 2, 2, 1}));
  EXPECT_EQ(column_by_id(g, t, 1), (std::vector<Degree>{1, 1, 1, 1}));
  EXPECT_EQ(orig(g, t.core(2, 0)), (Ids{1, 2, 3}));
  EXPECT_EQ(t.max_k(0), 2u);
}

TEST(WFirmCore, ZeroLambdaUsesLargestDegree) {
  // With λ = 0 the empty layer set qualifies, so the index is the max-degree core.
  auto g = g1();
  auto t0 = wfirmcore_decompose(g, LambdaSet({0}));
  auto top1 = decompose(g, Summarizer::top_lambda(1, 2));
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    double tau = 0;
    for (const Core* c : top1.cores_containing(v)) tau = std::max(tau, c->scv.values[0]);
    EXPECT_EQ(double(t0.at(v, 0)), tau);
  }
}

TEST(WFirmCore, SingleLayerGivesClassicCoreNumbers) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = gen::random_multiplex(25, 1, 0.2, rng());
    auto t = wfirmcore_decompose(g, LambdaSet({1}));
    EXPECT_EQ(t.column(0), classic_core_numbers(g, 0));
  }
}

TEST(WFirmCore, MatchesNaivePeelWithWeights) {
  std::mt19937_64 rng(41);
  const double choices[] = {1, 5, 10};
  for (int trial = 0; trial < 80; ++trial) {
    std::size_t n = 3 + rng() % 10, L = 1 + rng() % 3;
    auto g = gen::with_random_weights(gen::random_multiplex(n, L, 0.35, rng()), choices, rng());
    std::vector<double> lam{1, 5, 6, 10, 11, 15, 16, 20, 21, 25, 30};
    std::shuffle(lam.begin(), lam.end(), rng);
    lam.resize(1 + rng() % 5);
    std::sort(lam.begin(), lam.end());
    LambdaSet set(lam);
    auto t = wfirmcore_decompose(g, set);
    for (std::size_t i = 0; i < set.size(); ++i) {
      for (Degree k = 0; k <= t.max_k(i) + 1; ++k) {
        auto expect = oracle::brute_wcore(g, k, set[i]);
        ASSERT_EQ(t.core(k, i), expect) << "k=" << k << " λ=" << set[i];
        ASSERT_EQ(wfirmcore_at(g, k, set[i]), expect);
      }
      if (i > 0) {
        for (NodeId v = 0; v < n; ++v) EXPECT_LE(t.at(v, i), t.at(v, i - 1));
      }
    }
  }
}

TEST(SpanCore, LambdaPresets) {
  auto g = gen::random_multiplex(5, 3, 0.5, 1);
  auto p = span_core_lambda_set(g, 2);
  EXPECT_EQ(p.lambdas.values(), (std::vector<double>{3, 6}));
  EXPECT_EQ(p.graph.weight(0, 2), 4.0);
  EXPECT_EQ(span_core_lambda_set(g, 3).lambdas.values(), std::vector<double>{7});
  EXPECT_EQ(span_core_lambda_set(g, 1).lambdas.values(), (std::vector<double>{1, 2, 4}));
  EXPECT_THROW(span_core_lambda_set(g, 4), InvalidArgument);
  EXPECT_THROW(span_core_lambda_set(g, 0), InvalidArgument);
}

TEST(SpanCore, WindowCoreIsContainedInPreset) {
  // Nodes with degree >= k in every layer of a window always satisfy the preset's
  // λ, so the classic window core sits inside the preset core.
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = gen::random_multiplex(10, 4, 0.4, rng());
    auto p = span_core_lambda_set(g, 2);
    auto t = wfirmcore_decompose(p.graph, p.lambdas);
    for (std::size_t start = 0; start + 2 <= 4; ++start) {
      std::vector<LayerId> window{LayerId(start), LayerId(start + 1)};
      for (Degree k = 1; k <= 3; ++k) {
        auto cube = oracle::brute_corecube(g, window, k);
        auto core = t.core(k, start);
        EXPECT_TRUE(std::includes(core.begin(), core.end(), cube.begin(), cube.end()));
      }
    }
  }
}
