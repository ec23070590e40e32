#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace sumcore;
using namespace testing_support;

namespace {

using Ids = std::vector<std::uint64_t>;

Ids peel_ids(const MultiplexGraph& g, const Summarizer& s, ScvIndex k) {
  auto all = all_nodes(g);
  return orig(g, k_score_peel(g, all, s, k));
}

}  // namespace

TEST(Peel, ToyGraphSum) {
  auto g = g1();
  auto s = Summarizer::sum(2);
  EXPECT_EQ(peel_ids(g, s, {2}), (Ids{1, 2, 3, 4}));
  EXPECT_EQ(peel_ids(g, s, {3}), Ids{});
}

TEST(Peel, ToyGraphMinMax) {
  auto g = g1();
  auto s = Summarizer::minmax(2);
  EXPECT_EQ(peel_ids(g, s, {1, 2}), Ids{});
  EXPECT_EQ(peel_ids(g, s, {1, 1}), (Ids{1, 2, 3, 4}));
  EXPECT_EQ(peel_ids(g, s, {0, 2}), (Ids{1, 2, 3}));
}

TEST(Peel, ZeroThresholdReturnsSeed) {
  auto g = g1();
  auto seed = dense(g, {2, 4});
  auto s = Summarizer::identity(2);
  EXPECT_EQ(k_score_peel(g, seed, s, {0, 0}), seed);
}

TEST(Peel, DimensionMismatch) {
  auto g = g1();
  auto all = all_nodes(g);
  EXPECT_THROW(k_score_peel(g, all, Summarizer::sum(2), {1, 1}), InvalidArgument);
}

TEST(MaximalScv, ToyGraph) {
  auto g = g1();
  auto s = Summarizer::minmax(2);
  auto all = all_nodes(g);
  EXPECT_EQ(maximal_scv(g, all, s), (ScvIndex{1, 1}));
  EXPECT_EQ(maximal_scv(g, dense(g, {1, 2, 3}), s), (ScvIndex{0, 2}));
  EXPECT_EQ(maximal_scv(g, dense(g, {2}), s), (ScvIndex{0, 0}));
  EXPECT_THROW(maximal_scv(g, NodeSet{}, s), InvalidArgument);
}

TEST(DfsPath, TopOneChain) {
  auto g = g1();
  auto s = Summarizer::top_lambda(1, 2);
  auto all = all_nodes(g);
  auto chain = dfs_path(g, all, s, {0}, 0);
  ASSERT_EQ(chain.size(), 2u);
  EXPECT_EQ(chain[0].scv, ScvIndex{1});
  EXPECT_EQ(orig(g, chain[0].members), (Ids{1, 2, 3, 4}));
  EXPECT_EQ(chain[1].scv, ScvIndex{2});
  EXPECT_EQ(orig(g, chain[1].members), (Ids{1, 2, 3}));
  ASSERT_EQ(chain[1].parents.size(), 1u);
  EXPECT_EQ(chain[1].parents[0], ScvIndex{1});
}

TEST(DfsPath, MinMaxSecondDimension) {
  auto g = g1();
  auto s = Summarizer::minmax(2);
  auto all = all_nodes(g);
  auto chain = dfs_path(g, all, s, {0, 0}, 1);
  ASSERT_EQ(chain.size(), 2u);
  EXPECT_EQ(orig(g, chain[0].members), (Ids{1, 2, 3, 4}));
  EXPECT_EQ(orig(g, chain[1].members), (Ids{1, 2, 3}));
}

TEST(DfsPath, EmptySeedAndBadDimension) {
  auto g = g1();
  auto s = Summarizer::minmax(2);
  EXPECT_TRUE(dfs_path(g, NodeSet{}, s, {0, 0}, 0).empty());
  auto all = all_nodes(g);
  EXPECT_THROW(dfs_path(g, all, s, {0, 0}, 2), InvalidArgument);
}

TEST(Decompose, ToyGraphMinMax) {
  auto g = g1();
  auto lat = decompose(g, Summarizer::minmax(2));
  ASSERT_TRUE(lat.complete());
  ASSERT_EQ(lat.size(), 2u);
  ASSERT_NE(lat.find({1, 1}), nullptr);
  ASSERT_NE(lat.find({0, 2}), nullptr);
  EXPECT_EQ(orig(g, lat.find({1, 1})->members), (Ids{1, 2, 3, 4}));
  EXPECT_EQ(orig(g, lat.find({0, 2})->members), (Ids{1, 2, 3}));
  auto sky = lat.skyline();
  EXPECT_EQ(sky.size(), 2u);
}

TEST(Decompose, ToyGraphTopOne) {
  auto g = g1();
  auto lat = decompose(g, Summarizer::top_lambda(1, 2));
  ASSERT_EQ(lat.size(), 2u);
  EXPECT_EQ(orig(g, lat.find({1})->members), (Ids{1, 2, 3, 4}));
  EXPECT_EQ(orig(g, lat.find({2})->members), (Ids{1, 2, 3}));
  EXPECT_EQ(lat.skyline(), std::vector<ScvIndex>{ScvIndex{2}});
}

TEST(Decompose, EdgelessGraphHasOneZeroCore) {
  auto g = MultiplexGraph::from_edges(3, 2, std::vector<LayerEdge>{});
  for (auto s : {Summarizer::identity(2), Summarizer::sum(2), Summarizer::minmax(2)}) {
    auto lat = decompose(g, s);
    ASSERT_EQ(lat.size(), 1u) << s.name();
    const auto& core = lat.cores().begin()->second;
    EXPECT_EQ(core.members.size(), 3u);
    for (double x : core.scv.values) EXPECT_EQ(x, 0.0);
  }
}

TEST(Decompose, SkylineOfNestedChain) {
  // A 4-clique in both layers plus a pendant: cores (1,1) ⊃ (3,3).
  std::vector<LayerEdge> e;
  for (LayerId l = 0; l < 2; ++l) {
    for (NodeId u = 0; u < 4; ++u)
      for (NodeId v = u + 1; v < 4; ++v) e.push_back({l, u, v});
    e.push_back({l, 3, 4});
  }
  auto g = MultiplexGraph::from_edges(5, 2, e);
  auto lat = decompose(g, Summarizer::identity(2));
  auto sky = lat.skyline();
  ASSERT_EQ(sky.size(), 1u);
  EXPECT_EQ(sky[0], (ScvIndex{3, 3}));
  EXPECT_EQ(lat.core_at({2, 2}).size(), 4u);
  EXPECT_EQ(lat.core_at({1, 0}).size(), 5u);
}

TEST(Decompose, BudgetTruncationIsFlagged) {
  auto g = gen::random_multiplex(12, 3, 0.5, 99);
  DecomposeLimits lim;
  lim.max_states = 2;
  auto lat = decompose(g, Summarizer::identity(3), lim);
  EXPECT_FALSE(lat.complete());
  EXPECT_THROW(lat.skyline(), InvalidArgument);
}

TEST(Decompose, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    auto g = gen::random_multiplex(12, 3, 0.4, rng());
    auto s = Summarizer::identity(3);
    auto a = decompose(g, s, {1'000'000, 0, 1});
    auto b = decompose(g, s, {1'000'000, 0, 4});
    ASSERT_EQ(a.size(), b.size());
    for (auto ia = a.cores().begin(), ib = b.cores().begin(); ia != a.cores().end(); ++ia, ++ib) {
      EXPECT_EQ(ia->first, ib->first);
      EXPECT_EQ(ia->second.members, ib->second.members);
      EXPECT_EQ(ia->second.parents.size(), ib->second.parents.size());
    }
  }
}

// Every distinct core is found, each under its maximal SCV, and the lattice
// answers membership queries exactly like the brute-force subset table.
TEST(Decompose, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(2024);
  const double weight_choices[] = {0.5, 1.0, 2.0};
  for (int trial = 0; trial < 120; ++trial) {
    std::size_t n = 3 + rng() % 8, L = 1 + rng() % 3;
    auto g = gen::random_multiplex(n, L, 0.3 + 0.1 * (trial % 4), rng());
    if (trial % 3 == 0) g = gen::with_random_weights(g, weight_choices, rng());
    Summarizer s = random_summarizer(L, rng);
    if (s.dims() > 2) s = Summarizer::minmax(L);
    auto lat = decompose(g, s);
    ASSERT_TRUE(lat.complete());
    oracle::BruteCoreTable table(g, s);

    std::set<std::vector<QKey>> expected;
    for (const auto& scv : table.scvs()) {
      auto members = table.core_at(ScvIndex([&] {
        std::vector<double> v;
        for (QKey q : scv) v.push_back(dequantize(q));
        return v;
      }()));
      ASSERT_FALSE(members.empty());
      expected.insert(maximal_scv(g, members, s).keys());
    }
    std::set<std::vector<QKey>> got;
    for (const auto& [key, core] : lat.cores()) got.insert(key);
    ASSERT_EQ(got, expected) << s.name() << " trial " << trial;

    for (const auto& [key, core] : lat.cores()) {
      EXPECT_EQ(maximal_scv(g, core.members, s).keys(), key);
      auto all = all_nodes(g);
      EXPECT_EQ(k_score_peel(g, all, s, core.scv), core.members);
      EXPECT_EQ(table.core_at(core.scv), core.members);
    }
  }
}

// A parent is a strictly larger core; if its SCV dominated the child's it would
// be feasible for the child's thresholds and hence inside the child.
TEST(Decompose, ParentsAreStrictSupersets) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = gen::random_multiplex(10, 2, 0.4, rng());
    auto lat = decompose(g, Summarizer::identity(2));
    for (const auto& [key, core] : lat.cores())
      for (const auto& p : core.parents) {
        const Core* parent = lat.find(p);
        ASSERT_NE(parent, nullptr);
        EXPECT_FALSE(p.dominates(core.scv));
        EXPECT_GT(parent->members.size(), core.members.size());
        EXPECT_TRUE(std::includes(parent->members.begin(), parent->members.end(), core.members.begin(),
                                  core.members.end()));
      }
  }
}

TEST(Decompose, CoresContainingIndex) {
  auto g = g1();
  auto lat = decompose(g, Summarizer::minmax(2));
  auto v4 = static_cast<NodeId>(g.node_index(4));
  auto v1 = static_cast<NodeId>(g.node_index(1));
  EXPECT_EQ(lat.cores_containing(v4).size(), 1u);
  EXPECT_EQ(lat.cores_containing(v1).size(), 2u);
}
