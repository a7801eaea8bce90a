#include <gtest/gtest.h>

#include <map>
#include <random>

#include "ntrace/baseline.hpp"
#include "test_support.hpp"

using namespace ntrace;
using namespace ntrace::testing;
using namespace ntrace::baseline;

namespace {

std::map<std::vector<Vertex>, std::uint64_t> as_map(const TraceMultiset& t) {
  std::map<std::vector<Vertex>, std::uint64_t> out;
  if (t.empty_count()) out[{}] = t.empty_count();
  for (std::size_t i = 0; i < t.size(); ++i) out[{t.trace(i).begin(), t.trace(i).end()}] = t.count(i);
  return out;
}

}  // namespace

TEST(Baseline, CycleOfFour) {
  Graph g = cycle(4);
  std::vector<Vertex> x{0, 2};
  TraceMultiset t = naive_trace_frequencies(g, x);
  EXPECT_EQ(t.empty_count(), 0u);
  EXPECT_EQ(t.multiplicity(std::vector<Vertex>{0, 2}), 2u);
  EXPECT_EQ(naive_trace_list(g, x), (TraceList{{0, 2}}));
  EXPECT_EQ(naive_neighbourhood_count(g, x), (NeighbourhoodCount{4, 2}));
}

TEST(Baseline, PathOfFive) {
  Graph g = path(5);
  std::vector<Vertex> x{0, 4};
  using M = std::map<std::vector<Vertex>, std::uint64_t>;
  EXPECT_EQ(as_map(naive_trace_frequencies(g, x)), (M{{{}, 1}, {{0}, 1}, {{4}, 1}}));
  EXPECT_EQ(naive_trace_list(g, x), (TraceList{{}, {0}, {4}}));
}

TEST(Baseline, EmptyQuery) {
  Graph g = path(5);
  std::vector<Vertex> none;
  TraceMultiset t = naive_trace_frequencies(g, none);
  EXPECT_EQ(t.size(), 0u);
  EXPECT_EQ(t.empty_count(), 5u);
  EXPECT_EQ(naive_trace_list(g, none), (TraceList{{}}));
  EXPECT_EQ(naive_neighbourhood_count(g, none), (NeighbourhoodCount{0, 0}));
}

TEST(Baseline, Counting) {
  Graph g = star(3);
  std::vector<Vertex> leaf{2};
  EXPECT_EQ(naive_neighbourhood_count(g, leaf), (NeighbourhoodCount{2, 1}));
  std::vector<Vertex> all{0, 1, 2, 3};
  EXPECT_EQ(naive_neighbourhood_count(g, all), (NeighbourhoodCount{4, 0}));
}

TEST(Baseline, UnknownVertex) {
  Graph g = path(3);
  std::vector<Vertex> bad{5};
  EXPECT_THROW(naive_trace_frequencies(g, bad), QueryError);
  EXPECT_THROW(naive_neighbourhood_count(g, bad), QueryError);
}

TEST(Baseline, MatchesDefinitionAndSelfConsistent) {
  std::mt19937_64 rng(61);
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 1 + rng() % 40;
    Graph g = random_graph(n, std::array{0.05, 0.15, 0.4}[round % 3], rng);
    auto x = random_subset(n, rng() % (n + 1), rng);
    TraceMultiset t = naive_trace_frequencies(g, x);
    auto expected = brute_traces(g, x);
    EXPECT_EQ(as_map(t), expected);
    EXPECT_EQ(naive_trace_list(g, x), t.support());
    EXPECT_EQ(naive_neighbourhood_count(g, x).open, (n - x.size()) - t.empty_count());
  }
}
