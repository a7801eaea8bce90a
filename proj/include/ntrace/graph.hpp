#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ntrace {

using Vertex = std::uint32_t;

// Compressed sparse row adjacency: neighbours of v live in
// targets[offsets[v] .. offsets[v + 1]).
struct Csr {
  std::vector<std::size_t> offsets{0};
  std::vector<Vertex> targets;

  std::span<const Vertex> row(Vertex v) const {
    return {targets.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }

  // Hints for query loops that walk rows of scattered vertices.
  void prefetch_offsets(Vertex v) const { __builtin_prefetch(offsets.data() + v); }
  void prefetch_row(Vertex v) const { __builtin_prefetch(targets.data() + offsets[v]); }
};

/// Immutable simple undirected graph with dense vertex ids.
///
/// Cheap to copy: copies share the same underlying storage. Adjacency lists
/// are strictly increasing by vertex id, and `label(v)` returns the token the
/// vertex was created from.
class Graph {
 public:
  Graph() : data_(std::make_shared<const Data>()) {}

  /// Builds a graph from token pairs. Self-loops are dropped, parallel edges
  /// collapsed, and ids assigned in first-appearance order of the tokens.
  static Graph from_edges(std::span<const std::pair<std::string, std::string>> pairs) {
    std::unordered_map<std::string, Vertex> ids;
    std::vector<std::string> labels;
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(pairs.size());
    auto intern = [&](const std::string& token) {
      auto [it, inserted] = ids.try_emplace(token, static_cast<Vertex>(labels.size()));
      if (inserted) labels.push_back(token);
      return it->second;
    };
    for (const auto& [a, b] : pairs) {
      Vertex u = intern(a);
      Vertex v = intern(b);
      edges.emplace_back(u, v);
    }
    return from_dense(std::move(labels), edges);
  }

  /// Integer tokens; labels are their decimal spelling.
  static Graph from_edges(std::span<const std::pair<std::int64_t, std::int64_t>> pairs) {
    std::unordered_map<std::int64_t, Vertex> ids;
    std::vector<std::string> labels;
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(pairs.size());
    auto intern = [&](std::int64_t token) {
      auto [it, inserted] = ids.try_emplace(token, static_cast<Vertex>(labels.size()));
      if (inserted) labels.push_back(std::to_string(token));
      return it->second;
    };
    for (const auto& [a, b] : pairs) {
      Vertex u = intern(a);
      Vertex v = intern(b);
      edges.emplace_back(u, v);
    }
    return from_dense(std::move(labels), edges);
  }

  static Graph from_edges(std::initializer_list<std::pair<std::int64_t, std::int64_t>> pairs) {
    return from_edges(std::span<const std::pair<std::int64_t, std::int64_t>>(pairs.begin(), pairs.size()));
  }

  /// Vertices 0..n-1 already dense; labels default to the decimal id.
  /// Edges may repeat, appear in both orientations, or be loops.
  static Graph from_dense(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges) {
    std::vector<std::string> labels(n);
    for (std::size_t v = 0; v < n; ++v) labels[v] = std::to_string(v);
    return from_dense(std::move(labels), edges);
  }

  static Graph from_dense(std::vector<std::string> labels, std::span<const std::pair<Vertex, Vertex>> edges) {
    const std::size_t n = labels.size();
    Data data;
    data.labels = std::move(labels);
    std::vector<std::size_t> degree(n, 0);
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw std::out_of_range("edge endpoint outside vertex range");
      if (u == v) continue;
      ++degree[u];
      ++degree[v];
    }
    data.adjacency.offsets.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) data.adjacency.offsets[v + 1] = data.adjacency.offsets[v] + degree[v];
    data.adjacency.targets.resize(data.adjacency.offsets[n]);
    std::vector<std::size_t> fill(data.adjacency.offsets.begin(), data.adjacency.offsets.end() - 1);
    for (auto [u, v] : edges) {
      if (u == v) continue;
      data.adjacency.targets[fill[u]++] = v;
      data.adjacency.targets[fill[v]++] = u;
    }
    // sort and dedup each row, then compact
    std::size_t out = 0;
    std::size_t row_begin = 0;
    for (std::size_t v = 0; v < n; ++v) {
      auto first = data.adjacency.targets.begin() + static_cast<std::ptrdiff_t>(row_begin);
      auto last = data.adjacency.targets.begin() + static_cast<std::ptrdiff_t>(data.adjacency.offsets[v + 1]);
      std::sort(first, last);
      last = std::unique(first, last);
      row_begin = data.adjacency.offsets[v + 1];
      data.adjacency.offsets[v] = out;
      for (auto it = first; it != last; ++it) data.adjacency.targets[out++] = *it;
    }
    data.adjacency.offsets[n] = out;
    data.adjacency.targets.resize(out);
    data.adjacency.targets.shrink_to_fit();
    data.edge_count = out / 2;
    Graph g;
    g.data_ = std::make_shared<const Data>(std::move(data));
    return g;
  }

  std::size_t n() const { return data_->labels.size(); }
  std::size_t m() const { return data_->edge_count; }

  std::span<const Vertex> neighbours(Vertex v) const { return data_->adjacency.row(v); }
  std::size_t degree(Vertex v) const { return neighbours(v).size(); }

  bool adjacent(Vertex u, Vertex v) const {
    auto row = neighbours(u);
    return std::binary_search(row.begin(), row.end(), v);
  }

  const std::string& label(Vertex v) const { return data_->labels[v]; }
  const std::vector<std::string>& labels() const { return data_->labels; }

  bool contains(std::uint64_t v) const { return v < n(); }

  bool same_storage(const Graph& other) const { return data_ == other.data_; }

 private:
  struct Data {
    std::vector<std::string> labels;
    Csr adjacency;
    std::size_t edge_count = 0;
  };

  std::shared_ptr<const Data> data_;
};

/// A graph plus a total order of its vertices.
///
/// `left(u)` holds the neighbours preceding u in the order and `right(u)` the
/// ones following it; both are sorted ascending by rank.
class OrderedGraph {
 public:
  OrderedGraph() : data_(std::make_shared<const Data>()) {}

  /// `order[i]` is the vertex at position i. Throws std::invalid_argument if
  /// `order` is not a permutation of the vertices of `g`.
  static OrderedGraph orient(const Graph& g, std::vector<Vertex> order) {
    const std::size_t n = g.n();
    if (order.size() != n) throw std::invalid_argument("ordering has " + std::to_string(order.size()) +
                                                        " entries, graph has " + std::to_string(n) + " vertices");
    Data data;
    data.graph = g;
    data.rank.assign(n, kUnranked);
    for (std::size_t pos = 0; pos < n; ++pos) {
      Vertex v = order[pos];
      if (v >= n) throw std::invalid_argument("ordering names unknown vertex " + std::to_string(v));
      if (data.rank[v] != kUnranked) throw std::invalid_argument("ordering repeats vertex " + std::to_string(v));
      data.rank[v] = static_cast<Vertex>(pos);
    }
    data.order = std::move(order);

    data.left.offsets.assign(n + 1, 0);
    data.right.offsets.assign(n + 1, 0);
    for (Vertex u = 0; u < n; ++u) {
      std::size_t l = 0;
      for (Vertex v : g.neighbours(u)) l += data.rank[v] < data.rank[u];
      data.left.offsets[u + 1] = data.left.offsets[u] + l;
      data.right.offsets[u + 1] = data.right.offsets[u] + (g.degree(u) - l);
      data.max_left_degree = std::max(data.max_left_degree, l);
    }
    data.left.targets.resize(data.left.offsets[n]);
    data.right.targets.resize(data.right.offsets[n]);
    auto by_rank = [&](Vertex a, Vertex b) { return data.rank[a] < data.rank[b]; };
    for (Vertex u = 0; u < n; ++u) {
      std::size_t li = data.left.offsets[u];
      std::size_t ri = data.right.offsets[u];
      for (Vertex v : g.neighbours(u)) {
        if (data.rank[v] < data.rank[u]) data.left.targets[li++] = v;
        else data.right.targets[ri++] = v;
      }
      auto lb = data.left.targets.begin();
      auto rb = data.right.targets.begin();
      std::sort(lb + static_cast<std::ptrdiff_t>(data.left.offsets[u]),
                lb + static_cast<std::ptrdiff_t>(data.left.offsets[u + 1]), by_rank);
      std::sort(rb + static_cast<std::ptrdiff_t>(data.right.offsets[u]),
                rb + static_cast<std::ptrdiff_t>(data.right.offsets[u + 1]), by_rank);
    }
    OrderedGraph og;
    og.data_ = std::make_shared<const Data>(std::move(data));
    return og;
  }

  const Graph& graph() const { return data_->graph; }
  std::size_t n() const { return data_->graph.n(); }
  std::size_t m() const { return data_->graph.m(); }

  Vertex rank(Vertex v) const { return data_->rank[v]; }
  Vertex at(std::size_t position) const { return data_->order[position]; }
  const std::vector<Vertex>& order() const { return data_->order; }

  std::span<const Vertex> left(Vertex u) const { return data_->left.row(u); }
  std::span<const Vertex> right(Vertex u) const { return data_->right.row(u); }
  const Csr& left_rows() const { return data_->left; }

  /// Maximum left-degree of the ordering.
  std::size_t max_left_degree() const { return data_->max_left_degree; }

  bool precedes(Vertex a, Vertex b) const { return rank(a) < rank(b); }

  /// True when both handles refer to the same oriented storage.
  bool same_as(const OrderedGraph& other) const { return data_ == other.data_; }

 private:
  static constexpr Vertex kUnranked = ~Vertex{0};

  struct Data {
    Graph graph;
    std::vector<Vertex> rank;
    std::vector<Vertex> order;
    Csr left;
    Csr right;
    std::size_t max_left_degree = 0;
  };

  std::shared_ptr<const Data> data_;
};

inline OrderedGraph orient(const Graph& g, std::vector<Vertex> order) {
  return OrderedGraph::orient(g, std::move(order));
}

}  // namespace ntrace
