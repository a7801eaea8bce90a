#include <gtest/gtest.h>

#include <map>
#include <random>

#include "ntrace/trace_index.hpp"
#include "test_support.hpp"

using namespace ntrace;
using namespace ntrace::testing;

namespace {

TraceIndex build_for(const OrderedGraph& og) { return TraceIndex::build(og, two_reach(og)); }

// entry(x) decoded to id-sorted vertex sets
std::map<std::vector<Vertex>, std::uint64_t> decoded(const TraceIndex& idx, Vertex x) {
  std::map<std::vector<Vertex>, std::uint64_t> out;
  for (const auto& e : idx.entry(x)) {
    auto set = idx.decode(x, e.key);
    std::sort(set.begin(), set.end());
    out[set] = e.count;
  }
  return out;
}

void check_invariants(const TraceIndex& idx) {
  const auto& og = idx.ordered_graph();
  const auto stats = idx.memory_stats();
  EXPECT_EQ(stats.total_count, og.m());
  EXPECT_LE(stats.max_keys_per_vertex, key_bound(idx.reach().d(), idx.reach().s2()));
  for (Vertex x = 0; x < og.n(); ++x) {
    const auto entries = idx.entry(x);
    std::vector<Block> prev;
    for (const auto& e : entries) {
      EXPECT_GT(e.count, 0u);
      EXPECT_EQ(e.key.bits, idx.reach().closed(x).size());
      // owner bit (x is the last element of closed(x)) is always set
      EXPECT_TRUE(e.key.test(e.key.bits - 1));
      auto members = idx.decode(x, e.key);
      ASSERT_FALSE(members.empty());
      EXPECT_EQ(members.back(), x);
      for (Vertex w : members) EXPECT_LE(og.rank(w), og.rank(x));
      // strictly ascending bit patterns, most significant block last in storage
      if (!prev.empty()) {
        EXPECT_TRUE(std::lexicographical_compare(prev.rbegin(), prev.rend(), e.key.blocks.rbegin(),
                                                 e.key.blocks.rend()));
      }
      prev.assign(e.key.blocks.begin(), e.key.blocks.end());
    }
  }
}

}  // namespace

TEST(TraceIndex, CycleOfFour) {
  TraceIndex idx = build_for(orient(cycle(4), {0, 1, 2, 3}));
  using M = std::map<std::vector<Vertex>, std::uint64_t>;
  EXPECT_EQ(decoded(idx, 0), (M{{{0}, 2}}));
  EXPECT_EQ(decoded(idx, 1), (M{{{1}, 1}}));
  EXPECT_EQ(decoded(idx, 2), (M{{{0, 2}, 1}}));
  EXPECT_TRUE(idx.entry(3).empty());
  EXPECT_EQ(idx.entry(2).size(), 1u);
  EXPECT_EQ((*idx.entry(2).begin()).count, 1u);
  EXPECT_EQ(idx.memory_stats().total_keys, 3u);
  EXPECT_EQ(idx.count(2, idx.encode(2, std::vector<Vertex>{0, 2}).view()), 1u);
  EXPECT_EQ(idx.count(2, idx.encode(2, std::vector<Vertex>{2}).view()), 0u);
}

TEST(TraceIndex, PathOfFive) {
  TraceIndex idx = build_for(orient(path(5), {0, 1, 2, 3, 4}));
  using M = std::map<std::vector<Vertex>, std::uint64_t>;
  for (Vertex i = 0; i < 4; ++i) EXPECT_EQ(decoded(idx, i), (M{{{i}, 1}}));
  EXPECT_TRUE(idx.entry(4).empty());
  EXPECT_EQ(idx.memory_stats().max_keys_per_vertex, 1u);
}

TEST(TraceIndex, EdgelessGraph) {
  TraceIndex idx = build_for(orient(Graph::from_dense(4, {}), {0, 1, 2, 3}));
  for (Vertex x = 0; x < 4; ++x) EXPECT_TRUE(idx.entry(x).empty());
  EXPECT_EQ(idx.memory_stats().total_keys, 0u);
  EXPECT_EQ(idx.memory_stats().total_count, 0u);
}

TEST(TraceIndex, Errors) {
  Graph g = cycle(4);
  OrderedGraph a = orient(g, {0, 1, 2, 3});
  OrderedGraph b = orient(g, {0, 1, 2, 3});
  EXPECT_THROW(TraceIndex::build(a, two_reach(b)), std::invalid_argument);
  TraceIndex idx = build_for(a);
  EXPECT_THROW(idx.entry(4), std::out_of_range);
}

TEST(TraceIndex, MatchesBruteForceEnumeration) {
  std::mt19937_64 rng(41);
  for (int round = 0; round < 120; ++round) {
    Graph g = random_graph(1 + rng() % 35, std::array{0.05, 0.15, 0.4}[round % 3], rng);
    for (const auto& og : {degeneracy_order(g), degree_order(g)}) {
      TraceIndex idx = build_for(og);
      auto oracle = brute_index(og);
      for (Vertex x = 0; x < g.n(); ++x) EXPECT_EQ(decoded(idx, x), oracle[x]) << "round " << round << " x " << x;
      check_invariants(idx);
    }
  }
}

TEST(TraceIndex, StructuredGraphs) {
  for (std::size_t n = 1; n <= 12; ++n) check_invariants(build_for(degeneracy_order(complete(n))));
  check_invariants(build_for(degeneracy_order(grid(12, 17))));
  check_invariants(build_for(degree_order(grid(12, 17))));
  check_invariants(build_for(degeneracy_order(star(30))));
  check_invariants(build_for(degree_order(star(30))));
}

TEST(TraceIndex, KeysWiderThanOneBlock) {
  // K_70 forces |S²[x]| up to 70, i.e. two-block keys
  Graph g = complete(70);
  OrderedGraph og = degeneracy_order(g);
  TraceIndex idx = build_for(og);
  check_invariants(idx);
  auto oracle = brute_index(og);
  for (Vertex x = 0; x < g.n(); ++x) EXPECT_EQ(decoded(idx, x), oracle[x]);
}

TEST(KeyBound, Saturates) {
  EXPECT_EQ(key_bound(0, 0), 0u);
  EXPECT_EQ(key_bound(1, 2), 12u);
  EXPECT_EQ(key_bound(3, 3), 243u);
  EXPECT_EQ(key_bound(60, 1000), std::numeric_limits<std::uint64_t>::max());
}
