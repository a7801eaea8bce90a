#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ntrace/baseline.hpp"
#include "ntrace/graph.hpp"
#include "ntrace/io.hpp"
#include "ntrace/ordering.hpp"
#include "ntrace/query.hpp"
#include "ntrace/trace_index.hpp"

namespace ntrace {

enum class Task { count, list, freq };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::count: return "count";
    case Task::list: return "list";
    case Task::freq: return "freq";
  }
  return "?";
}

inline std::optional<Task> parse_task(std::string_view s) {
  if (s == "count") return Task::count;
  if (s == "list") return Task::list;
  if (s == "freq") return Task::freq;
  return std::nullopt;
}

/// Indexed and baseline answers differ; benchmarking stops.
class CorrectnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchConfig {
  std::string network = "graph";
  std::vector<Task> tasks{Task::count, Task::list, Task::freq};
  // "log", "sqrt", or a positive integer
  std::vector<std::string> sizes{"log", "10", "50", "sqrt"};
  std::size_t queries = 1000;
  std::uint64_t seed = 1;
  // degeneracy | degree | best | file:PATH
  std::string ordering = "best";
  // per (task, size) cell and algorithm
  double time_limit_s = 600.0;
  // false writes zeros in every timing column, for byte-comparable reports
  bool timings = true;
  // run cells concurrently; each timed region stays single-threaded
  bool parallel = false;
};

struct BenchRow {
  std::string network;
  std::string task;
  std::string algorithm;
  std::string size_class;
  std::size_t size = 0;
  std::size_t queries = 0;
  double setup_ms = 0;
  // setup included
  double total_ms = 0;
  // per query, setup excluded
  double mean_us = 0;
  std::uint64_t checksum = 0;
  // ok | skipped | timeout
  std::string status = "ok";
};

namespace detail {

inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix(h ^ splitmix(v)); }

}  // namespace detail

/// `k` independent uniformly random `size`-subsets of V(g), each sorted by
/// id. Fully determined by `seed`.
inline std::vector<std::vector<Vertex>> generate_query_sets(const Graph& g, std::size_t size, std::size_t k,
                                                            std::uint64_t seed) {
  const std::size_t n = g.n();
  if (size == 0 || size > n)
    throw std::invalid_argument("query size " + std::to_string(size) + " outside [1, " + std::to_string(n) + "]");
  std::mt19937_64 rng(seed);
  // Partial Fisher–Yates from an arbitrary permutation still yields a uniform
  // subset, so the pool is carried over between draws.
  std::vector<Vertex> pool(n);
  std::iota(pool.begin(), pool.end(), Vertex{0});
  std::vector<std::vector<Vertex>> sets;
  sets.reserve(k);
  for (std::size_t q = 0; q < k; ++q) {
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t j = i + detail::uniform_below(rng, n - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<Vertex> s(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(s.begin(), s.end());
    sets.push_back(std::move(s));
  }
  return sets;
}

/// ⌈log₂ n⌉ for "log", ⌈√n⌉ for "sqrt", both at least 1; integers verbatim.
/// Throws std::invalid_argument for anything else.
inline std::size_t resolve_size(const std::string& size_class, std::size_t n) {
  if (size_class == "log") {
    std::size_t k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return std::max<std::size_t>(k, 1);
  }
  if (size_class == "sqrt") {
    auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while (r * r < n) ++r;
    return std::max<std::size_t>(r, 1);
  }
  if (size_class.empty() || size_class.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("unknown size class '" + size_class + "'");
  const std::size_t v = std::stoull(size_class);
  if (v == 0) throw std::invalid_argument("query size must be positive");
  return v;
}

inline std::uint64_t checksum(const TraceMultiset& t) {
  std::uint64_t h = detail::mix(0x74726163ULL, t.empty_count());
  for (std::size_t i = 0; i < t.size(); ++i) {
    h = detail::mix(h, t.trace(i).size());
    for (Vertex v : t.trace(i)) h = detail::mix(h, v);
    h = detail::mix(h, t.count(i));
  }
  return h;
}

inline std::uint64_t checksum(const TraceList& list) {
  std::uint64_t h = detail::mix(0x6c697374ULL, list.size());
  for (const Trace& t : list) {
    h = detail::mix(h, t.size());
    for (Vertex v : t) h = detail::mix(h, v);
  }
  return h;
}

inline std::uint64_t checksum(const NeighbourhoodCount& c) {
  return detail::mix(detail::mix(0x636f756eULL, c.closed), c.open);
}

/// An ordering together with its strongly 2-reachable sets.
struct PreparedOrdering {
  OrderedGraph ordered;
  TwoReachSets reach;
  OrderingStats stats;
};

/// `strategy` is degeneracy, degree, best, or file:PATH.
inline PreparedOrdering make_ordering(const Graph& g, const std::string& strategy) {
  if (strategy == "best") {
    OrderingChoice c = best_ordering(g);
    return {std::move(c.ordered), std::move(c.reach), std::move(c.stats)};
  }
  OrderedGraph og;
  if (strategy == "degeneracy") {
    og = degeneracy_order(g);
  } else if (strategy == "degree") {
    og = degree_order(g);
  } else if (strategy.rfind("file:", 0) == 0) {
    const std::string path = strategy.substr(5);
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open ordering file '" + path + "'");
    og = read_ordering(g, in);
  } else {
    throw std::invalid_argument("unknown ordering strategy '" + strategy + "'");
  }
  TwoReachSets sets = two_reach(og);
  OrderingStats stats = ordering_stats(strategy, sets);
  return {std::move(og), std::move(sets), std::move(stats)};
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct CellResult {
  BenchRow indexed;
  BenchRow baseline;
};

template <class Indexed, class Naive>
inline void time_cell(const std::vector<std::vector<Vertex>>& sets, double limit_ms, Indexed&& indexed, Naive&& naive,
                      CellResult& cell) {
  double indexed_ms = 0;
  double baseline_ms = 0;
  std::uint64_t h = 0x62656e6368ULL;
  std::size_t done = 0;
  for (const auto& x : sets) {
    auto t0 = Clock::now();
    auto a = indexed(x);
    indexed_ms += ms_since(t0);
    auto t1 = Clock::now();
    auto b = naive(x);
    baseline_ms += ms_since(t1);
    if (!(a == b)) throw CorrectnessError("indexed and baseline results differ on query " + std::to_string(done));
    h = mix(h, checksum(a));
    ++done;
    if (indexed_ms > limit_ms || baseline_ms > limit_ms) {
      cell.indexed.status = cell.baseline.status = "timeout";
      break;
    }
  }
  cell.indexed.queries = cell.baseline.queries = done;
  cell.indexed.checksum = cell.baseline.checksum = h;
  cell.indexed.total_ms = indexed_ms;
  cell.baseline.total_ms = baseline_ms;
}

}  // namespace detail

/// Builds the ordering and index once, then runs every (task, size class)
/// cell through both the indexed and the baseline algorithm on the same
/// query sets. Any disagreement throws CorrectnessError before a row is
/// produced. Size classes larger than the graph yield "skipped" rows.
inline std::vector<BenchRow> run_bench(const Graph& g, const BenchConfig& cfg) {
  if (cfg.queries == 0) throw std::invalid_argument("queries per class must be at least 1");
  const auto setup_start = detail::Clock::now();
  PreparedOrdering prepared = make_ordering(g, cfg.ordering);
  const TraceIndex index = TraceIndex::build(prepared.ordered, prepared.reach);
  const double setup_ms = detail::ms_since(setup_start);

  struct Cell {
    Task task;
    std::string size_class;
    std::size_t size;
  };
  std::vector<Cell> cells;
  for (Task t : cfg.tasks)
    for (const auto& s : cfg.sizes) cells.push_back({t, s, resolve_size(s, g.n())});

  auto run_cell = [&](const Cell& c) {
    detail::CellResult r;
    for (BenchRow* row : {&r.indexed, &r.baseline}) {
      row->network = cfg.network;
      row->task = task_name(c.task);
      row->size_class = c.size_class;
      row->size = c.size;
    }
    r.indexed.algorithm = "indexed";
    r.baseline.algorithm = "baseline";
    if (c.size > g.n()) {
      r.indexed.status = r.baseline.status = "skipped";
      return r;
    }
    // query sets depend on the size only, so every task sees the same sets
    const auto sets = generate_query_sets(g, c.size, cfg.queries, detail::mix(cfg.seed, c.size));
    QueryEngine engine(index);
    const double limit_ms = cfg.time_limit_s * 1000.0;
    switch (c.task) {
      case Task::count:
        detail::time_cell(
            sets, limit_ms, [&](const auto& x) { return engine.neighbourhood_count(engine.prepare(x)); },
            [&](const auto& x) { return baseline::naive_neighbourhood_count(g, x); }, r);
        break;
      case Task::list:
        detail::time_cell(
            sets, limit_ms, [&](const auto& x) { return engine.trace_list(engine.prepare(x)); },
            [&](const auto& x) { return baseline::naive_trace_list(g, x); }, r);
        break;
      case Task::freq:
        detail::time_cell(
            sets, limit_ms, [&](const auto& x) { return engine.trace_frequencies(engine.prepare(x)); },
            [&](const auto& x) { return baseline::naive_trace_frequencies(g, x); }, r);
        break;
    }
    const double indexed_query_ms = r.indexed.total_ms;
    r.indexed.setup_ms = setup_ms;
    r.indexed.total_ms = setup_ms + indexed_query_ms;
    r.indexed.mean_us = r.indexed.queries ? indexed_query_ms * 1000.0 / static_cast<double>(r.indexed.queries) : 0;
    r.baseline.mean_us =
        r.baseline.queries ? r.baseline.total_ms * 1000.0 / static_cast<double>(r.baseline.queries) : 0;
    return r;
  };

  std::vector<detail::CellResult> results;
  if (cfg.parallel) {
    std::vector<std::future<detail::CellResult>> futures;
    for (const auto& c : cells) futures.push_back(std::async(std::launch::async, run_cell, std::cref(c)));
    for (auto& f : futures) results.push_back(f.get());
  } else {
    for (const auto& c : cells) results.push_back(run_cell(c));
  }

  std::vector<BenchRow> rows;
  for (auto& r : results) {
    for (BenchRow* row : {&r.indexed, &r.baseline}) {
      if (!cfg.timings) row->setup_ms = row->total_ms = row->mean_us = 0;
      rows.push_back(std::move(*row));
    }
  }
  return rows;
}

struct StatsReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<OrderingStats> candidates;
  OrderingStats best;
  IndexMemoryStats index;
};

/// Both heuristic orderings, the chosen one, and the index it produces.
inline StatsReport stats_report(const Graph& g) {
  OrderingChoice choice = best_ordering(g);
  const TraceIndex index = TraceIndex::build(choice.ordered, choice.reach);
  return {g.n(), g.m(), choice.candidates, choice.stats, index.memory_stats()};
}

}  // namespace ntrace
