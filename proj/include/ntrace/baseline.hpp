#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ntrace/graph.hpp"
#include "ntrace/query.hpp"

// Straightforward reference algorithms. They only touch Graph adjacency and
// share nothing with the indexed query path beyond the result types.
namespace ntrace::baseline {

namespace detail {

struct TraceHash {
  std::size_t operator()(const Trace& t) const noexcept {
    std::size_t h = t.size();
    for (Vertex v : t) h ^= std::hash<Vertex>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

inline std::vector<char> membership(const Graph& g, std::span<const Vertex> x, std::size_t& distinct) {
  std::vector<char> in(g.n(), 0);
  distinct = 0;
  for (Vertex v : x) {
    if (v >= g.n()) throw QueryError("query vertex " + std::to_string(v) + " is not in the graph");
    if (!in[v]) {
      in[v] = 1;
      ++distinct;
    }
  }
  return in;
}

}  // namespace detail

/// For each y in N(X) \ X, scans N(y) against a membership array and counts
/// the resulting traces; everything else gets the empty trace.
inline TraceMultiset naive_trace_frequencies(const Graph& g, std::span<const Vertex> x) {
  std::size_t size = 0;
  const std::vector<char> in = detail::membership(g, x, size);
  std::vector<char> seen(g.n(), 0);
  std::unordered_map<Trace, Count, detail::TraceHash> counts;
  Count non_empty = 0;
  Trace trace;
  for (Vertex v : x) {
    for (Vertex y : g.neighbours(v)) {
      if (in[y] || seen[y]) continue;
      seen[y] = 1;
      trace.clear();
      for (Vertex w : g.neighbours(y))
        if (in[w]) trace.push_back(w);
      ++counts[trace];
      ++non_empty;
    }
  }
  TraceMultiset::Builder builder;
  for (const auto& [t, c] : counts) builder.add(t, c);
  builder.set_empty(static_cast<Count>(g.n() - size) - non_empty);
  return std::move(builder).finish();
}

inline TraceList naive_trace_list(const Graph& g, std::span<const Vertex> x) {
  return naive_trace_frequencies(g, x).support();
}

/// |X ∪ N(X)| by marking, and the same minus |X|.
inline NeighbourhoodCount naive_neighbourhood_count(const Graph& g, std::span<const Vertex> x) {
  std::size_t size = 0;
  std::vector<char> seen = detail::membership(g, x, size);
  Count closed = size;
  for (Vertex v : x) {
    for (Vertex y : g.neighbours(v)) {
      if (seen[y]) continue;
      seen[y] = 1;
      ++closed;
    }
  }
  return {closed, closed - size};
}

}  // namespace ntrace::baseline
