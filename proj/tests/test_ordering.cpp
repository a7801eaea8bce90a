#include <gtest/gtest.h>

#include <random>

#include "ntrace/ordering.hpp"
#include "test_support.hpp"

using namespace ntrace;
using namespace ntrace::testing;

namespace {

std::vector<Vertex> sorted(std::span<const Vertex> s) {
  std::vector<Vertex> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

void expect_matches_oracle(const OrderedGraph& og) {
  TwoReachSets sets = two_reach(og);
  std::size_t s2 = 0;
  for (Vertex u = 0; u < og.n(); ++u) {
    auto closed = sets.closed(u);
    ASSERT_FALSE(closed.empty());
    EXPECT_EQ(closed.back(), u);
    for (std::size_t i = 1; i < closed.size(); ++i) EXPECT_LT(og.rank(closed[i - 1]), og.rank(closed[i]));
    EXPECT_EQ(sorted(sets.open(u)), brute_two_reach(og, u)) << "vertex " << u;
    for (std::size_t i = 0; i < closed.size(); ++i) EXPECT_EQ(sets.position(u, closed[i]), i);
    s2 = std::max(s2, sets.open(u).size());
  }
  EXPECT_EQ(sets.s2(), s2);
  EXPECT_EQ(sets.d(), og.max_left_degree());
}

}  // namespace

TEST(DegeneracyOrder, KnownGraphs) {
  EXPECT_EQ(degeneracy_order(complete(4)).max_left_degree(), 3u);
  EXPECT_EQ(degeneracy_order(star(3)).max_left_degree(), 1u);
  EXPECT_EQ(degeneracy_order(grid(5, 5)).max_left_degree(), 2u);
  EXPECT_EQ(degeneracy_order(Graph::from_dense(3, {})).max_left_degree(), 0u);
  EXPECT_EQ(degeneracy_order(Graph{}).n(), 0u);
}

TEST(DegeneracyOrder, MatchesLinearScanPeeling) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 60; ++round) {
    Graph g = random_graph(1 + rng() % 40, 0.05 + 0.1 * (round % 4), rng);
    auto [removal, worst] = brute_peel(g);
    OrderedGraph og = degeneracy_order(g);
    std::vector<Vertex> reversed(removal.rbegin(), removal.rend());
    EXPECT_EQ(og.order(), reversed);
    EXPECT_EQ(og.max_left_degree(), worst);
  }
}

TEST(DegreeOrder, TieBreaksById) {
  OrderedGraph s = degree_order(star(3));
  EXPECT_EQ(s.order(), (std::vector<Vertex>{1, 2, 3, 0}));
  EXPECT_EQ(s.max_left_degree(), 3u);
  OrderedGraph k = degree_order(complete(4));
  EXPECT_EQ(k.order(), (std::vector<Vertex>{0, 1, 2, 3}));
  EXPECT_EQ(k.max_left_degree(), 3u);
  OrderedGraph e = degree_order(Graph::from_dense(3, {}));
  EXPECT_EQ(e.order(), (std::vector<Vertex>{0, 1, 2}));
  EXPECT_EQ(e.max_left_degree(), 0u);
}

TEST(TwoReach, CycleOfFour) {
  OrderedGraph og = orient(cycle(4), {0, 1, 2, 3});
  TwoReachSets sets = two_reach(og);
  EXPECT_TRUE(sets.open(0).empty());
  EXPECT_EQ(sorted(sets.open(1)), (std::vector<Vertex>{0}));
  EXPECT_EQ(sorted(sets.open(2)), (std::vector<Vertex>{0, 1}));
  EXPECT_EQ(sorted(sets.open(3)), (std::vector<Vertex>{0, 2}));
  EXPECT_EQ(sets.s2(), 2u);
  expect_matches_oracle(og);
}

TEST(TwoReach, PathOfFive) {
  OrderedGraph og = orient(path(5), {0, 1, 2, 3, 4});
  TwoReachSets sets = two_reach(og);
  for (Vertex u = 1; u < 5; ++u) EXPECT_EQ(sorted(sets.open(u)), (std::vector<Vertex>{u - 1}));
  EXPECT_EQ(sets.s2(), 1u);
}

TEST(TwoReach, CompleteGraph) {
  EXPECT_EQ(two_reach(orient(complete(4), {3, 1, 0, 2})).s2(), 3u);
  EXPECT_EQ(two_reach(degeneracy_order(complete(4))).s2(), 3u);
}

TEST(TwoReach, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(33);
  for (int round = 0; round < 80; ++round) {
    Graph g = random_graph(1 + rng() % 40, std::array{0.05, 0.15, 0.4}[round % 3], rng);
    expect_matches_oracle(degeneracy_order(g));
    expect_matches_oracle(degree_order(g));
  }
}

TEST(TwoReach, DegeneracyBoundedByS2) {
  std::mt19937_64 rng(34);
  for (int round = 0; round < 50; ++round) {
    Graph g = random_graph(2 + rng() % 50, 0.1, rng);
    if (g.m() == 0) continue;
    for (const auto& og : {degeneracy_order(g), degree_order(g)}) {
      TwoReachSets sets = two_reach(og);
      EXPECT_LE(sets.d(), sets.s2());
      for (Vertex u = 0; u < og.n(); ++u)
        for (Vertex w : og.left(u)) EXPECT_TRUE(sets.position(u, w).has_value());
    }
  }
}

TEST(TwoReach, IsolatedVertexChangesNothing) {
  std::mt19937_64 rng(35);
  for (int round = 0; round < 20; ++round) {
    Graph g = random_graph(20, 0.2, rng);
    EdgeList e;
    for (Vertex u = 0; u < g.n(); ++u)
      for (Vertex v : g.neighbours(u))
        if (u < v) e.emplace_back(u, v);
    Graph bigger = Graph::from_dense(g.n() + 1, e);
    std::vector<Vertex> order(g.n());
    std::iota(order.begin(), order.end(), Vertex{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Vertex> order_plus = order;
    order_plus.insert(order_plus.begin() + static_cast<std::ptrdiff_t>(rng() % (order.size() + 1)),
                      static_cast<Vertex>(g.n()));
    TwoReachSets a = two_reach(orient(g, order));
    TwoReachSets b = two_reach(orient(bigger, order_plus));
    for (Vertex u = 0; u < g.n(); ++u) EXPECT_EQ(sorted(a.open(u)), sorted(b.open(u)));
    EXPECT_TRUE(b.open(static_cast<Vertex>(g.n())).empty());
  }
}

TEST(TwoReach, Histogram) {
  TwoReachSets sets = two_reach(orient(cycle(4), {0, 1, 2, 3}));
  EXPECT_EQ(sets.histogram(), (std::vector<std::size_t>{1, 1, 2}));
  EXPECT_TRUE(two_reach(OrderedGraph{}).histogram().empty());
}

TEST(BestOrdering, StarPrefersDegeneracy) {
  OrderingChoice c = best_ordering(star(3));
  ASSERT_EQ(c.candidates.size(), 2u);
  EXPECT_EQ(c.candidates[0].s2, 1u);
  EXPECT_EQ(c.candidates[1].s2, 3u);
  EXPECT_EQ(c.stats.strategy, "degeneracy");
  EXPECT_EQ(c.reach.s2(), 1u);
}

TEST(BestOrdering, TiesGoToDegeneracy) {
  OrderingChoice k = best_ordering(complete(4));
  EXPECT_EQ(k.stats.strategy, "degeneracy");
  EXPECT_EQ(k.stats.s2, 3u);
  OrderingChoice c = best_ordering(cycle(4));
  EXPECT_EQ(c.candidates[0].s2, 2u);
  EXPECT_EQ(c.candidates[1].s2, 2u);
  EXPECT_EQ(c.stats.strategy, "degeneracy");
}

TEST(BestOrdering, IsMinimumOfCandidates) {
  std::mt19937_64 rng(36);
  for (int round = 0; round < 30; ++round) {
    Graph g = random_graph(30, 0.1 + 0.01 * round, rng);
    OrderingChoice c = best_ordering(g);
    EXPECT_EQ(c.stats.s2, std::min(c.candidates[0].s2, c.candidates[1].s2));
    EXPECT_TRUE(c.reach.ordered_graph().same_as(c.ordered));
  }
}

TEST(TwoReach, SizesOnlyPassMatchesSets) {
  std::mt19937_64 rng(404);
  for (int round = 0; round < 30; ++round) {
    Graph g = random_graph(1 + rng() % 50, 0.15, rng);
    for (const auto& og : {degeneracy_order(g), degree_order(g)}) {
      TwoReachSets sets = two_reach(og);
      const auto sizes = two_reach_sizes(og);
      for (Vertex u = 0; u < g.n(); ++u) EXPECT_EQ(sizes[u], sets.open(u).size());
      const auto a = ordering_stats("x", sets);
      const auto b = ordering_stats("x", og, sizes);
      EXPECT_EQ(a.s2, b.s2);
      EXPECT_EQ(a.d, b.d);
      EXPECT_EQ(a.s2_histogram, b.s2_histogram);
    }
  }
}
