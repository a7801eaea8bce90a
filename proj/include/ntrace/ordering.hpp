#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ntrace/graph.hpp"

namespace ntrace {

/// Reverse of the min-degree peeling sequence, so every vertex has at most
/// degeneracy(g) left neighbours. Ties go to the smallest vertex id.
inline OrderedGraph degeneracy_order(const Graph& g) {
  const std::size_t n = g.n();
  std::vector<Vertex> degree(n);
  std::size_t max_degree = 0;
  for (Vertex v = 0; v < n; ++v) {
    degree[v] = static_cast<Vertex>(g.degree(v));
    max_degree = std::max<std::size_t>(max_degree, degree[v]);
  }
  // One min-heap of ids per degree; entries go stale when a vertex moves to
  // a lower bucket and are skipped on pop.
  std::vector<std::vector<Vertex>> buckets(max_degree + 1);
  for (Vertex v = 0; v < n; ++v) buckets[degree[v]].push_back(v);
  for (auto& b : buckets) std::make_heap(b.begin(), b.end(), std::greater<>{});

  std::vector<char> removed(n, 0);
  std::vector<Vertex> order(n);
  std::size_t filled = n;
  std::size_t current = 0;
  while (filled > 0) {
    while (buckets[current].empty()) ++current;
    auto& bucket = buckets[current];
    std::pop_heap(bucket.begin(), bucket.end(), std::greater<>{});
    Vertex v = bucket.back();
    bucket.pop_back();
    if (removed[v] || degree[v] != current) continue;
    removed[v] = 1;
    order[--filled] = v;
    for (Vertex w : g.neighbours(v)) {
      if (removed[w]) continue;
      auto& target = buckets[--degree[w]];
      target.push_back(w);
      std::push_heap(target.begin(), target.end(), std::greater<>{});
      current = std::min<std::size_t>(current, degree[w]);
    }
  }
  return OrderedGraph::orient(g, std::move(order));
}

/// Ascending degree, ties by vertex id.
inline OrderedGraph degree_order(const Graph& g) {
  std::vector<Vertex> order(g.n());
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return g.degree(a) < g.degree(b); });
  return OrderedGraph::orient(g, std::move(order));
}

/// Strongly 2-reachable sets of an ordered graph.
///
/// `closed(u)` lists S²(u) ∪ {u} ascending by rank, so u is always the last
/// element. A vertex w belongs to S²(u) when it precedes u and is a left
/// neighbour of u or of some right neighbour of u. Copies share storage.
class TwoReachSets {
 public:
  TwoReachSets() = default;

  static TwoReachSets compute(const OrderedGraph& og) {
    const std::size_t n = og.n();
    TwoReachSets sets;
    sets.ordered_ = og;
    Csr csr;
    csr.offsets.assign(n + 1, 0);
    sets.d_ = og.max_left_degree();

    std::vector<Vertex> stamp(n, 0);  // stamp[w] == u + 1 marks w as collected for u
    std::vector<Vertex> scratch;
    auto by_rank = [&](Vertex a, Vertex b) { return og.rank(a) < og.rank(b); };
    for (Vertex u = 0; u < n; ++u) {
      scratch.clear();
      const Vertex mark = u + 1;
      const Vertex ru = og.rank(u);
      for (Vertex w : og.left(u)) {
        stamp[w] = mark;
        scratch.push_back(w);
      }
      for (Vertex v : og.right(u)) {
        for (Vertex w : og.left(v)) {
          if (og.rank(w) >= ru || stamp[w] == mark) continue;
          stamp[w] = mark;
          scratch.push_back(w);
        }
      }
      std::sort(scratch.begin(), scratch.end(), by_rank);
      scratch.push_back(u);
      sets.s2_ = std::max(sets.s2_, scratch.size() - 1);
      csr.targets.insert(csr.targets.end(), scratch.begin(), scratch.end());
      csr.offsets[u + 1] = csr.targets.size();
    }
    sets.sets_ = std::make_shared<const Csr>(std::move(csr));
    return sets;
  }

  /// S²[u]: members ascending by rank, u last.
  std::span<const Vertex> closed(Vertex u) const { return sets_->row(u); }
  const Csr& closed_rows() const { return *sets_; }

  /// S²(u), i.e. closed(u) without u.
  std::span<const Vertex> open(Vertex u) const {
    auto c = closed(u);
    return c.first(c.size() - 1);
  }

  /// Index of w within closed(u), or nullopt when w is not a member.
  std::optional<std::size_t> position(Vertex u, Vertex w) const {
    auto c = closed(u);
    const Vertex rw = ordered_.rank(w);
    auto it = std::lower_bound(c.begin(), c.end(), rw,
                               [&](Vertex member, Vertex r) { return ordered_.rank(member) < r; });
    if (it == c.end() || *it != w) return std::nullopt;
    return static_cast<std::size_t>(it - c.begin());
  }

  /// Maximum left-degree of the ordering.
  std::size_t d() const { return d_; }
  /// Maximum |S²(u)| over all vertices.
  std::size_t s2() const { return s2_; }

  /// histogram()[k] = number of vertices with |S²(u)| = k.
  std::vector<std::size_t> histogram() const {
    if (ordered_.n() == 0) return {};
    std::vector<std::size_t> h(s2_ + 1, 0);
    for (Vertex u = 0; u < ordered_.n(); ++u) ++h[open(u).size()];
    return h;
  }

  std::size_t total_size() const { return sets_->targets.size(); }

  const OrderedGraph& ordered_graph() const { return ordered_; }

 private:
  OrderedGraph ordered_;
  std::shared_ptr<const Csr> sets_ = std::make_shared<const Csr>();
  std::size_t d_ = 0;
  std::size_t s2_ = 0;
};

inline TwoReachSets two_reach(const OrderedGraph& og) { return TwoReachSets::compute(og); }

/// |S²(u)| for every u, without materialising the sets.
inline std::vector<std::size_t> two_reach_sizes(const OrderedGraph& og) {
  const std::size_t n = og.n();
  std::vector<std::size_t> sizes(n, 0);
  std::vector<Vertex> stamp(n, 0);
  for (Vertex u = 0; u < n; ++u) {
    const Vertex mark = u + 1;
    const Vertex ru = og.rank(u);
    std::size_t k = 0;
    for (Vertex w : og.left(u)) {
      stamp[w] = mark;
      ++k;
    }
    for (Vertex v : og.right(u))
      for (Vertex w : og.left(v)) {
        if (og.rank(w) >= ru || stamp[w] == mark) continue;
        stamp[w] = mark;
        ++k;
      }
    sizes[u] = k;
  }
  return sizes;
}

struct OrderingStats {
  std::string strategy;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t d = 0;
  std::size_t s2 = 0;
  std::vector<std::size_t> s2_histogram;
};

inline OrderingStats ordering_stats(std::string strategy, const TwoReachSets& sets) {
  const auto& og = sets.ordered_graph();
  return {std::move(strategy), og.n(), og.m(), sets.d(), sets.s2(), sets.histogram()};
}

inline OrderingStats ordering_stats(std::string strategy, const OrderedGraph& og, std::span<const std::size_t> sizes) {
  OrderingStats st{std::move(strategy), og.n(), og.m(), og.max_left_degree(), 0, {}};
  if (sizes.empty()) return st;
  st.s2 = *std::max_element(sizes.begin(), sizes.end());
  st.s2_histogram.assign(st.s2 + 1, 0);
  for (std::size_t k : sizes) ++st.s2_histogram[k];
  return st;
}

struct OrderingChoice {
  OrderedGraph ordered;
  TwoReachSets reach;
  OrderingStats stats;
  // every evaluated heuristic, degeneracy first
  std::vector<OrderingStats> candidates;
};

/// Evaluates the degeneracy and degree heuristics and keeps the one with the
/// smaller s₂; ties favour the degeneracy ordering.
inline OrderingChoice best_ordering(const Graph& g) {
  OrderedGraph degen = degeneracy_order(g);
  OrderedGraph by_degree = degree_order(g);

  OrderingChoice choice;
  choice.candidates.push_back(ordering_stats("degeneracy", degen, two_reach_sizes(degen)));
  choice.candidates.push_back(ordering_stats("degree", by_degree, two_reach_sizes(by_degree)));
  const bool degree_wins = choice.candidates[1].s2 < choice.candidates[0].s2;
  choice.ordered = degree_wins ? std::move(by_degree) : std::move(degen);
  choice.reach = two_reach(choice.ordered);
  choice.stats = choice.candidates[degree_wins ? 1 : 0];
  return choice;
}

}  // namespace ntrace
