#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ntrace/bitkey.hpp"
#include "ntrace/graph.hpp"
#include "ntrace/trace_index.hpp"

namespace ntrace {

/// A trace as a vertex list sorted by id.
using Trace = std::vector<Vertex>;

/// Set of traces, sorted lexicographically (the empty trace sorts first).
using TraceList = std::vector<Trace>;

class QueryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Multiset of traces: how many outside vertices induce each trace.
///
/// Non-empty traces are stored with multiplicity ≥ 1 in lexicographic order
/// of their sorted vertex lists; the empty trace is kept separately and may
/// have multiplicity 0.
class TraceMultiset {
 public:
  struct Item {
    std::span<const Vertex> trace;
    Count count;
  };

  class Builder {
   public:
    /// `trace` must be sorted by vertex id and non-empty; zero counts are dropped.
    void add(std::span<const Vertex> trace, Count count) {
      if (count == 0) return;
      const std::size_t at = members_.size();
      starts_.push_back(at);
      members_.resize(at + trace.size());
      std::copy(trace.begin(), trace.end(), members_.begin() + static_cast<std::ptrdiff_t>(at));
      counts_.push_back(count);
    }

    void set_empty(Count count) { empty_ = count; }

    void reserve(std::size_t traces, std::size_t members) {
      starts_.reserve(traces + 1);
      counts_.reserve(traces);
      members_.reserve(members);
    }

    TraceMultiset finish() && {
      const std::size_t k = counts_.size();
      starts_.push_back(members_.size());
      auto span_of = [&](std::size_t i) {
        return std::span<const Vertex>(members_.data() + starts_[i], starts_[i + 1] - starts_[i]);
      };
      // order by the first two members packed into one word, then by the rest
      struct Sortable {
        std::uint64_t prefix;
        std::size_t index;
      };
      std::vector<Sortable> order(k);
      for (std::size_t i = 0; i < k; ++i) {
        auto t = span_of(i);
        order[i] = {(std::uint64_t{t[0]} << 32) | (t.size() > 1 ? std::uint64_t{t[1]} + 1 : 0), i};
      }
      auto tail_less = [&](std::size_t a, std::size_t b) {
        auto sa = span_of(a).subspan(std::min<std::size_t>(2, span_of(a).size()));
        auto sb = span_of(b).subspan(std::min<std::size_t>(2, span_of(b).size()));
        return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
      };
      std::sort(order.begin(), order.end(), [&](const Sortable& a, const Sortable& b) {
        if (a.prefix != b.prefix) return a.prefix < b.prefix;
        return tail_less(a.index, b.index);
      });
      TraceMultiset out;
      out.empty_ = empty_;
      out.members_.reserve(members_.size());
      out.counts_.reserve(k);
      out.offsets_.reserve(k + 1);
      for (std::size_t i = 0; i < k; ++i) {
        auto s = span_of(order[i].index);
        if (i > 0 && order[i].prefix == order[i - 1].prefix && std::ranges::equal(s, out.trace(out.counts_.size() - 1))) {
          out.counts_.back() += counts_[order[i].index];
          continue;
        }
        out.members_.insert(out.members_.end(), s.begin(), s.end());
        out.offsets_.push_back(out.members_.size());
        out.counts_.push_back(counts_[order[i].index]);
      }
      return out;
    }

   private:
    std::vector<Vertex> members_;
    std::vector<std::size_t> starts_;
    std::vector<Count> counts_;
    Count empty_ = 0;
  };

  /// Number of distinct non-empty traces.
  std::size_t size() const { return counts_.size(); }

  std::span<const Vertex> trace(std::size_t i) const {
    return {members_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  Count count(std::size_t i) const { return counts_[i]; }
  Item operator[](std::size_t i) const { return {trace(i), counts_[i]}; }

  Count empty_count() const { return empty_; }

  /// Multiplicity of a trace given as a vertex list sorted by id.
  Count multiplicity(std::span<const Vertex> t) const {
    if (t.empty()) return empty_;
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      auto s = trace(mid);
      if (std::lexicographical_compare(s.begin(), s.end(), t.begin(), t.end())) lo = mid + 1;
      else hi = mid;
    }
    return lo < size() && std::ranges::equal(trace(lo), t) ? counts_[lo] : 0;
  }

  /// Sum of all multiplicities including the empty trace.
  Count total() const { return std::accumulate(counts_.begin(), counts_.end(), empty_); }

  /// Traces with multiplicity ≥ 1.
  TraceList support() const {
    TraceList out;
    out.reserve(size() + 1);
    if (empty_ > 0) out.emplace_back();
    for (std::size_t i = 0; i < size(); ++i) out.emplace_back(trace(i).begin(), trace(i).end());
    return out;
  }

  friend bool operator==(const TraceMultiset&, const TraceMultiset&) = default;

 private:
  std::vector<Vertex> members_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Count> counts_;
  Count empty_ = 0;
};

struct NeighbourhoodCount {
  /// |N[X]|
  Count closed = 0;
  /// |N(X) \ X|
  Count open = 0;

  friend bool operator==(const NeighbourhoodCount&, const NeighbourhoodCount&) = default;
};

/// A query set prepared against one index: members sorted by rank, plus for
/// each member x_i a mask of closed(x_i) ∩ X and a table translating
/// positions of closed(x_i) into positions of X.
class QuerySet {
 public:
  const TraceIndex& index() const { return index_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  /// Members ascending by rank.
  std::span<const Vertex> members() const { return members_; }
  Vertex member(std::size_t i) const { return members_[i]; }

  /// Blocks per canonical trace bit vector.
  std::size_t width() const { return blocks_for(members_.size()); }

  std::span<const Block> mask(std::size_t i) const {
    return {masks_.data() + mask_begin_[i], mask_begin_[i + 1] - mask_begin_[i]};
  }
  /// X-position of each element of closed(x_i), -1 when not in X.
  std::span<const std::int32_t> translation(std::size_t i) const {
    return {translation_.data() + translation_begin_[i], translation_begin_[i + 1] - translation_begin_[i]};
  }

 private:
  friend class QueryEngine;

  TraceIndex index_;
  std::vector<Vertex> members_;
  std::vector<Block> masks_;
  std::vector<std::size_t> mask_begin_{0};
  std::vector<std::int32_t> translation_;
  std::vector<std::size_t> translation_begin_{0};
};

/// Answers trace and neighbourhood queries against one TraceIndex.
///
/// Holds O(n) scratch that is reused between queries, so an engine must not
/// be shared between threads; create one per thread instead. The index
/// itself is shared freely.
class QueryEngine {
 public:
  explicit QueryEngine(TraceIndex index)
      : index_(std::move(index)), position_(index_.n(), -1), slot_(index_.n(), -1) {}

  const TraceIndex& index() const { return index_; }

  /// Validates, deduplicates and sorts `vertices` by rank. Throws QueryError
  /// on ids outside the graph.
  QuerySet prepare(std::span<const Vertex> vertices) {
    const OrderedGraph& og = index_.ordered_graph();
    const TwoReachSets& sets = index_.reach();
    QuerySet q;
    q.index_ = index_;
    ranked_.clear();
    for (Vertex v : vertices) {
      if (v >= og.n()) throw QueryError("query vertex " + std::to_string(v) + " is not in the graph");
      ranked_.push_back((std::uint64_t{og.rank(v)} << 32) | v);
    }
    std::sort(ranked_.begin(), ranked_.end());
    ranked_.erase(std::unique(ranked_.begin(), ranked_.end()), ranked_.end());
    q.members_.resize(ranked_.size());
    for (std::size_t i = 0; i < ranked_.size(); ++i) q.members_[i] = static_cast<Vertex>(ranked_[i]);

    mark(q);
    const std::size_t ell = q.size();
    q.mask_begin_.resize(ell + 1);
    q.translation_begin_.resize(ell + 1);
    std::size_t mask_total = 0, translation_total = 0;
    for (std::size_t i = 0; i < ell; ++i) {
      if (i + 2 * kAhead < ell) sets.closed_rows().prefetch_offsets(q.members_[i + 2 * kAhead]);
      const std::size_t bits = sets.closed(q.members_[i]).size();
      mask_total += blocks_for(bits);
      translation_total += bits;
      q.mask_begin_[i + 1] = mask_total;
      q.translation_begin_[i + 1] = translation_total;
    }
    q.masks_.assign(mask_total, 0);
    q.translation_.resize(translation_total);
    const Csr& rows = sets.closed_rows();
    for (std::size_t i = 0; i < ell; ++i) {
      if (i + kAhead < ell) rows.prefetch_row(q.members_[i + kAhead]);
      if (i + kAhead / 2 < ell)
        for (Vertex w : sets.closed(q.members_[i + kAhead / 2])) __builtin_prefetch(position_.data() + w);
      const auto ground = sets.closed(q.members_[i]);
      Block* m = q.masks_.data() + q.mask_begin_[i];
      std::int32_t* t = q.translation_.data() + q.translation_begin_[i];
      for (std::size_t p = 0; p < ground.size(); ++p) {
        const std::int32_t xp = position_[ground[p]];
        t[p] = xp;
        if (xp >= 0) m[p / kBlockBits] |= Block{1} << (p % kBlockBits);
      }
    }
    unmark(q);
    return q;
  }

  /// Multiplicity of N(y) ∩ X over all y ∉ X.
  TraceMultiset trace_frequencies(const QuerySet& q) {
    check(q);
    const OrderedGraph& og = index_.ordered_graph();
    const std::size_t ell = q.size();
    mark(q);
    counter_.clear();
    buffer_.assign(q.width(), 0);
    singles_.assign(ell, 0);

    // Not |V \ X|: part 2 below also removes one left-prefix trace for every
    // member of X, so starting from |V| keeps the empty trace exact.
    empty_ = static_cast<std::int64_t>(og.n());

    // Part 1: right traces. Each key A of x_i restricted to X has x_i as its
    // maximum; add it and retract the telescoped prefix without x_i.
    for (std::size_t i = 0; i < ell; ++i) {
      prefetch_entries(q, i);
      const auto mask = q.mask(i);
      const auto translation = q.translation(i);
      const auto entries = index_.entry(q.member(i));
      const std::size_t key_width = entries.width();
      const Block* key = entries.blocks().data();
      const auto counts = entries.counts();
      for (std::size_t e = 0; e < counts.size(); ++e, key += key_width) {
        hits_.clear();
        for (std::size_t b = 0; b < key_width; ++b) {
          Block word = key[b] & mask[b];
          while (word) {
            hits_.push_back(static_cast<std::uint32_t>(translation[b * kBlockBits + static_cast<std::size_t>(std::countr_zero(word))]));
            word &= word - 1;
          }
        }
        const auto c = static_cast<std::int64_t>(counts[e]);
        add(hits_, c);
        add(std::span<const std::uint32_t>(hits_.data(), hits_.size() - 1), -c);
      }
    }

    // Part 2: vertices of N⁻[X] got credited with N⁻(u) ∩ X; swap in N(u) ∩ X.
    collect_left_closure(q);
    layout_closure_traces();
    for (std::size_t s = 0; s < closure_.size(); ++s) {
      const auto trace = std::span<const std::uint32_t>(closure_positions_.data() + closure_begin_[s],
                                                         closure_begin_[s + 1] - closure_begin_[s]);
      add(trace.first(closure_left_[s]), -1);
      if (position_[closure_[s]] < 0) add(trace, 1);
    }

    TraceMultiset::Builder builder;
    builder.reserve(ell + counter_.size(), ell + 2 * counter_.size());
    auto emit = [&](std::int64_t value, auto&& decode) {
      if (value < 0) throw std::logic_error("negative trace multiplicity");
      if (value == 0) return;
      decoded_.clear();
      decode();
      std::sort(decoded_.begin(), decoded_.end());
      builder.add(decoded_, static_cast<Count>(value));
    };
    if (empty_ < 0) throw std::logic_error("negative trace multiplicity");
    builder.set_empty(static_cast<Count>(empty_));
    for (std::size_t p = 0; p < ell; ++p) emit(singles_[p], [&] { decoded_.push_back(q.member(p)); });
    counter_.for_each([&](std::span<const Block> k, std::int64_t value) {
      emit(value, [&] { for_each_bit(k, [&](std::size_t p) { decoded_.push_back(q.member(p)); }); });
    });
    release_closure();
    unmark(q);
    return std::move(builder).finish();
  }

  TraceList trace_list(const QuerySet& q) { return trace_frequencies(q).support(); }

  /// |N[X]| and |N(X) \ X|.
  NeighbourhoodCount neighbourhood_count(const QuerySet& q) {
    check(q);
    const std::size_t ell = q.size();
    mark(q);

    // Part 1: vertices with a left X-neighbour, counted at the smallest one.
    std::int64_t c = 0;
    for (std::size_t i = 0; i < ell; ++i) {
      prefetch_entries(q, i);
      const auto mask = q.mask(i);
      const auto entries = index_.entry(q.member(i));
      const std::size_t key_width = entries.width();
      const Block* key = entries.blocks().data();
      const auto counts = entries.counts();
      for (std::size_t e = 0; e < counts.size(); ++e, key += key_width) {
        std::size_t hits = 0;
        for (std::size_t b = 0; b < key_width && hits < 2; ++b)
          hits += static_cast<std::size_t>(std::popcount(key[b] & mask[b]));
        if (hits == 1) c += static_cast<std::int64_t>(counts[e]);
      }
    }

    // Part 2: all of N⁻[X].
    // Part 3: members of N⁻[X] that also have a left X-neighbour were counted
    // twice. That includes outside vertices with both a left and a right
    // X-neighbour, not only members of X.
    collect_left_closure(q);
    c += static_cast<std::int64_t>(closure_.size());
    for (std::size_t left : closure_left_) c -= left > 0;
    release_closure();
    unmark(q);
    const auto closed = static_cast<Count>(c);
    return {closed, closed - ell};
  }

 private:
  void check(const QuerySet& q) const {
    if (!q.index_.same_as(index_)) throw QueryError("query set was prepared for a different index");
  }

  void mark(const QuerySet& q) {
    for (std::size_t i = 0; i < q.size(); ++i) position_[q.member(i)] = static_cast<std::int32_t>(i);
  }

  void unmark(const QuerySet& q) {
    for (Vertex v : q.members()) position_[v] = -1;
  }

  // Canonical traces are bit vectors over X. Traces with at most one member
  // are kept in flat arrays; the rest go through the hashed counter.
  void add(std::span<const std::uint32_t> positions, std::int64_t delta) {
    if (positions.empty()) {
      empty_ += delta;
    } else if (positions.size() == 1) {
      singles_[positions[0]] += delta;
    } else {
      for (std::uint32_t p : positions) set_bit(buffer_, p);
      counter_.add(buffer_, delta);
      for (std::uint32_t p : positions) clear_bit(buffer_, p);
    }
  }

  static constexpr std::size_t kAhead = 8;

  void prefetch_entries(const QuerySet& q, std::size_t i) const {
    if (i + 2 * kAhead < q.size()) index_.prefetch_head(q.member(i + 2 * kAhead));
    if (i + kAhead < q.size()) index_.prefetch_entry(q.member(i + kAhead));
  }

  // Walks N⁻[x_1], …, N⁻[x_ℓ]. The first visit of u records its left trace
  // N⁻(u) ∩ X, and every visit from x_i is kept as (slot of u, i). The walk
  // is split into passes so each can prefetch the scattered rows it needs.
  void collect_left_closure(const QuerySet& q) {
    const OrderedGraph& og = index_.ordered_graph();
    const Csr& rows = og.left_rows();
    const std::size_t ell = q.size();
    raw_.clear();
    for (std::size_t i = 0; i < ell; ++i) {
      if (i + 2 * kAhead < ell) rows.prefetch_offsets(q.member(i + 2 * kAhead));
      if (i + kAhead < ell) rows.prefetch_row(q.member(i + kAhead));
      const Vertex x = q.member(i);
      for (Vertex u : og.left(x)) raw_.push_back({u, static_cast<std::uint32_t>(i)});
      raw_.push_back({x, static_cast<std::uint32_t>(i)});
    }

    closure_.clear();
    visits_.resize(raw_.size());
    for (std::size_t j = 0; j < raw_.size(); ++j) {
      if (j + 2 * kAhead < raw_.size()) {
        __builtin_prefetch(slot_.data() + raw_[j + 2 * kAhead].slot);
        rows.prefetch_offsets(raw_[j + 2 * kAhead].slot);
      }
      const Vertex u = raw_[j].slot;
      if (slot_[u] < 0) {
        slot_[u] = static_cast<std::int32_t>(closure_.size());
        closure_.push_back(u);
      }
      visits_[j] = {static_cast<std::uint32_t>(slot_[u]), raw_[j].position};
    }

    const std::size_t k = closure_.size();
    closure_left_.resize(k);
    closure_begin_.resize(k + 1);
    left_positions_.clear();
    for (std::size_t s = 0; s < k; ++s) {
      if (s + kAhead < k) rows.prefetch_row(closure_[s + kAhead]);
      if (s + kAhead / 2 < k)
        for (Vertex w : og.left(closure_[s + kAhead / 2])) __builtin_prefetch(position_.data() + w);
      closure_begin_[s] = left_positions_.size();
      for (Vertex w : og.left(closure_[s]))
        if (position_[w] >= 0) left_positions_.push_back(static_cast<std::uint32_t>(position_[w]));
      closure_left_[s] = left_positions_.size() - closure_begin_[s];
    }
    closure_begin_[k] = left_positions_.size();
  }

  // Lays out [left positions | visiting positions] per closure vertex, so each
  // list reads N(u) ∩ X in X order (left positions precede right ones since
  // both follow rank).
  void layout_closure_traces() {
    const std::size_t k = closure_.size();
    fill_.assign(k + 1, 0);
    for (const auto& v : visits_) ++fill_[v.slot + 1];
    closure_positions_.resize(left_positions_.size() + visits_.size());
    std::size_t offset = 0;
    for (std::size_t s = 0; s < k; ++s) {
      const std::size_t left = closure_left_[s];
      std::copy_n(left_positions_.begin() + static_cast<std::ptrdiff_t>(closure_begin_[s]), left,
                  closure_positions_.begin() + static_cast<std::ptrdiff_t>(offset));
      const std::size_t right = fill_[s + 1];
      fill_[s] = offset + left;
      closure_begin_[s] = offset;
      offset += left + right;
    }
    closure_begin_[k] = offset;
    for (const auto& v : visits_) closure_positions_[fill_[v.slot]++] = v.position;
  }

  void release_closure() {
    for (Vertex u : closure_) slot_[u] = -1;
    closure_.clear();
  }

  TraceIndex index_;
  std::vector<std::int32_t> position_;  // vertex -> position in X, or -1
  std::vector<std::int32_t> slot_;      // vertex -> index in closure_, or -1
  struct Visit {
    std::uint32_t slot;
    std::uint32_t position;
  };

  std::vector<Vertex> closure_;
  std::vector<std::size_t> closure_left_;       // |N⁻(u) ∩ X| per closure vertex
  std::vector<std::size_t> closure_begin_;      // offsets into closure_positions_
  std::vector<std::uint32_t> closure_positions_;
  std::vector<std::uint32_t> left_positions_;
  std::vector<Visit> raw_;  // (vertex, position) before slots are assigned
  std::vector<Visit> visits_;
  std::vector<std::size_t> fill_;
  std::vector<std::uint32_t> hits_;
  std::vector<std::int64_t> singles_;
  std::int64_t empty_ = 0;
  Trace decoded_;
  std::vector<Block> buffer_;
  std::vector<std::uint64_t> ranked_;
  detail::BlockCounter counter_;
};

inline TraceMultiset trace_frequencies(const TraceIndex& index, std::span<const Vertex> vertices) {
  QueryEngine engine(index);
  return engine.trace_frequencies(engine.prepare(vertices));
}

inline TraceList trace_list(const TraceIndex& index, std::span<const Vertex> vertices) {
  QueryEngine engine(index);
  return engine.trace_list(engine.prepare(vertices));
}

inline NeighbourhoodCount neighbourhood_count(const TraceIndex& index, std::span<const Vertex> vertices) {
  QueryEngine engine(index);
  return engine.neighbourhood_count(engine.prepare(vertices));
}

}  // namespace ntrace
