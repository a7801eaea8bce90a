#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ntrace/io.hpp"
#include "ntrace/ordering.hpp"
#include "test_support.hpp"

using namespace ntrace;

TEST(EdgeList, TwoEdges) {
  Graph g = parse_edge_list("0 1\n1 2\n");
  EXPECT_EQ(g.n(), 3u);
  EXPECT_EQ(g.m(), 2u);
}

TEST(EdgeList, CommentsAndDuplicates) {
  Graph g = parse_edge_list("# comment\na b\nb a\n");
  EXPECT_EQ(g.n(), 2u);
  EXPECT_EQ(g.m(), 1u);
  EXPECT_EQ(g.label(0), "a");
}

TEST(EdgeList, PercentCommentsBlankLinesAndExtraColumns) {
  Graph g = parse_edge_list("% header\n\n   \n1\t2 0.5 1700000000\n2 3\r\n");
  EXPECT_EQ(g.n(), 3u);
  EXPECT_EQ(g.m(), 2u);
  EXPECT_EQ(g.label(2), "3");
}

TEST(EdgeList, SingleTokenLineIsAnError) {
  try {
    parse_edge_list("x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  try {
    parse_edge_list("a b\n# ok\nc\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(EdgeList, RejectsInvalidUtf8) {
  EXPECT_THROW(parse_edge_list("a \xff\n"), ParseError);
  EXPECT_THROW(parse_edge_list("a \xc3\n"), ParseError);
  EXPECT_THROW(parse_edge_list("a \xed\xa0\x80\n"), ParseError);  // surrogate
  Graph g = parse_edge_list("caf\xc3\xa9 \xe2\x82\xac\n");
  EXPECT_EQ(g.label(0), "caf\xc3\xa9");
}

TEST(EdgeList, LinePermutationPreservesStructure) {
  std::mt19937_64 rng(3);
  Graph base = ntrace::testing::random_graph(30, 0.15, rng);
  std::vector<std::string> lines;
  for (Vertex u = 0; u < base.n(); ++u)
    for (Vertex v : base.neighbours(u))
      if (u < v) lines.push_back(std::to_string(u) + " " + std::to_string(v));
  for (int round = 0; round < 10; ++round) {
    std::shuffle(lines.begin(), lines.end(), rng);
    std::string text;
    for (auto& l : lines) {
      // flip orientation on some lines
      if (rng() & 1) {
        auto sp = l.find(' ');
        l = l.substr(sp + 1) + " " + l.substr(0, sp);
      }
      text += l + "\n";
    }
    Graph g = parse_edge_list(text);
    ASSERT_EQ(g.m(), base.m());
    // same edges after translating labels back to the original ids
    for (Vertex u = 0; u < g.n(); ++u) {
      const Vertex bu = static_cast<Vertex>(std::stoul(g.label(u)));
      for (Vertex v : g.neighbours(u)) EXPECT_TRUE(base.adjacent(bu, static_cast<Vertex>(std::stoul(g.label(v)))));
    }
  }
}

TEST(Ordering, WriteAndReadBack) {
  Graph g = parse_edge_list("0 1\n1 2\n");
  OrderedGraph og = orient(g, {2, 0, 1});
  EXPECT_EQ(write_ordering(og), "2\n0\n1\n");
  OrderedGraph back = read_ordering(g, write_ordering(og));
  for (Vertex v = 0; v < g.n(); ++v) EXPECT_EQ(back.rank(v), og.rank(v));
}

TEST(Ordering, RoundTripOnRandomGraphs) {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 10; ++round) {
    Graph g = ntrace::testing::random_graph(40, 0.1, rng);
    OrderedGraph og = degeneracy_order(g);
    OrderedGraph back = read_ordering(g, write_ordering(og));
    EXPECT_EQ(back.order(), og.order());
  }
}

TEST(Ordering, ReadErrors) {
  Graph g = parse_edge_list("0 1\n1 2\n");
  EXPECT_THROW(read_ordering(g, "2\n0\n"), ParseError);
  EXPECT_THROW(read_ordering(g, "2\n0\n0\n"), ParseError);
  EXPECT_THROW(read_ordering(g, "2\n0\n9\n"), ParseError);
  EXPECT_THROW(read_ordering(g, "2 0\n1\n"), ParseError);
}
