#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ntrace/bitkey.hpp"
#include "ntrace/graph.hpp"
#include "ntrace/ordering.hpp"

namespace ntrace {

using Count = std::uint64_t;

namespace detail {

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

inline std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    r = saturating_mul(r, base);
    if (r == std::numeric_limits<std::uint64_t>::max()) break;
  }
  return r;
}

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

}  // namespace detail

/// Upper bound 3·s₂^(d+1) on the number of keys stored for a single vertex.
inline std::uint64_t key_bound(std::size_t d, std::size_t s2) {
  return detail::saturating_mul(3, detail::saturating_pow(s2, d + 1));
}

struct IndexMemoryStats {
  std::size_t total_keys = 0;
  std::size_t total_key_bits = 0;
  std::size_t max_keys_per_vertex = 0;
  std::uint64_t key_bound = 0;
  Count total_count = 0;
  // heap bytes of the frozen key and count arrays
  std::size_t bytes = 0;
};

/// For each vertex x, counts of the left-prefix traces seen at x.
///
/// A vertex y with x ∈ N⁻(y) contributes one to the key N⁻(y) ∩ V≤x of x.
/// Keys are bit vectors over the closed strongly 2-reachable set of x (whose
/// last bit, x itself, is always set). Immutable after build.
class TraceIndex {
 public:
  struct Entry {
    BitKeyView key;
    Count count;
  };

  class EntryRange {
   public:
    class iterator {
     public:
      using iterator_category = std::forward_iterator_tag;
      using value_type = Entry;
      using difference_type = std::ptrdiff_t;
      using pointer = void;
      using reference = Entry;

      iterator() = default;
      iterator(const Block* blocks, const Count* counts, std::size_t width, std::size_t bits)
          : blocks_(blocks), counts_(counts), width_(width), bits_(bits) {}

      Entry operator*() const { return {{std::span<const Block>(blocks_, width_), bits_}, *counts_}; }
      iterator& operator++() {
        blocks_ += width_;
        ++counts_;
        return *this;
      }
      iterator operator++(int) {
        iterator t = *this;
        ++*this;
        return t;
      }
      friend bool operator==(const iterator& a, const iterator& b) { return a.counts_ == b.counts_; }

     private:
      const Block* blocks_ = nullptr;
      const Count* counts_ = nullptr;
      std::size_t width_ = 0;
      std::size_t bits_ = 0;
    };

    EntryRange(const Block* blocks, const Count* counts, std::size_t size, std::size_t width, std::size_t bits)
        : blocks_(blocks), counts_(counts), size_(size), width_(width), bits_(bits) {}

    iterator begin() const { return {blocks_, counts_, width_, bits_}; }
    iterator end() const { return {blocks_ + size_ * width_, counts_ + size_, width_, bits_}; }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    std::size_t width() const { return width_; }
    std::span<const Block> blocks() const { return {blocks_, size_ * width_}; }
    std::span<const Count> counts() const { return {counts_, size_}; }

   private:
    const Block* blocks_;
    const Count* counts_;
    std::size_t size_;
    std::size_t width_;
    std::size_t bits_;
  };

  TraceIndex() = default;

  /// Throws std::invalid_argument unless `sets` was computed from `og`.
  static TraceIndex build(const OrderedGraph& og, const TwoReachSets& sets) {
    if (!sets.ordered_graph().same_as(og))
      throw std::invalid_argument("strongly 2-reachable sets were computed from a different ordered graph");
    const std::size_t n = og.n();

    TraceIndex index;
    auto data = std::make_shared<Data>();
    data->ordered = og;
    data->sets = sets;
    data->heads.resize(n);
    data->words.reserve(og.m() * 2);
    std::vector<Count> counts;

    // Keys of x come from the y with x ∈ N⁻(y), i.e. y ∈ N⁺(x); gather them
    // locally, sort, and merge equal keys.
    std::vector<Block> keys;
    std::vector<std::uint32_t> perm;
    for (Vertex x = 0; x < n; ++x) {
      const auto ground = sets.closed(x);
      const std::size_t width = blocks_for(ground.size());
      const auto right = og.right(x);
      keys.assign(right.size() * width, 0);
      for (std::size_t k = 0; k < right.size(); ++k) {
        const auto left = og.left(right[k]);
        std::span<Block> bits(keys.data() + k * width, width);
        // left ascends by rank like `ground`, so one merge pass places the prefix up to x
        std::size_t g = 0;
        for (std::size_t t = 0;; ++t) {
          const Vertex rank_t = og.rank(left[t]);
          while (g < ground.size() && og.rank(ground[g]) < rank_t) ++g;
          if (g == ground.size() || ground[g] != left[t])
            throw std::logic_error("left prefix escapes the strongly 2-reachable set");
          set_bit(bits, g);
          if (left[t] == x) break;
        }
      }
      const Block* base = keys.data();
      auto key_less = [&](std::uint32_t a, std::uint32_t b) {
        const Block* ka = base + a * width;
        const Block* kb = base + b * width;
        for (std::size_t i = width; i-- > 0;)
          if (ka[i] != kb[i]) return ka[i] < kb[i];
        return false;
      };
      perm.resize(right.size());
      std::iota(perm.begin(), perm.end(), std::uint32_t{0});
      std::sort(perm.begin(), perm.end(), key_less);
      // per vertex: all key blocks, then the counts
      Head& head = data->heads[x];
      head.offset = data->words.size();
      head.bits = static_cast<std::uint32_t>(ground.size());
      counts.clear();
      for (std::size_t k = 0; k < perm.size(); ++k) {
        const Block* key = base + perm[k] * width;
        if (k > 0 && !key_less(perm[k - 1], perm[k])) {
          ++counts.back();
          continue;
        }
        data->words.insert(data->words.end(), key, key + width);
        counts.push_back(1);
      }
      head.keys = static_cast<std::uint32_t>(counts.size());
      data->words.insert(data->words.end(), counts.begin(), counts.end());
    }
    index.data_ = std::move(data);
    return index;
  }

  /// Keys of x sorted by bit pattern (highest bit most significant), with
  /// their strictly positive counts.
  EntryRange entry(Vertex x) const {
    check_vertex(x);
    const Head& h = data_->heads[x];
    const std::size_t width = blocks_for(h.bits);
    const Block* blocks = data_->words.data() + h.offset;
    return {blocks, blocks + h.keys * width, h.keys, width, h.bits};
  }

  // Hints for query loops over scattered owners.
  void prefetch_head(Vertex x) const { __builtin_prefetch(data_->heads.data() + x); }
  void prefetch_entry(Vertex x) const { __builtin_prefetch(data_->words.data() + data_->heads[x].offset); }

  /// Count stored for key `k` at x; 0 when absent.
  Count count(Vertex x, BitKeyView k) const {
    for (const Entry& e : entry(x))
      if (e.key == k) return e.count;
    return 0;
  }

  /// Members of closed(x) selected by `k`, ascending by rank.
  std::vector<Vertex> decode(Vertex x, BitKeyView k) const {
    check_vertex(x);
    const auto ground = data_->sets.closed(x);
    std::vector<Vertex> out;
    for_each_bit(k.blocks, [&](std::size_t i) { out.push_back(ground[i]); });
    return out;
  }

  /// Bit key over closed(x) for a vertex set; every member must lie in closed(x).
  BitKey encode(Vertex x, std::span<const Vertex> members) const {
    check_vertex(x);
    BitKey k(data_->sets.closed(x).size());
    for (Vertex v : members) {
      auto pos = data_->sets.position(x, v);
      if (!pos) throw std::invalid_argument("vertex " + std::to_string(v) + " is outside S²[" + std::to_string(x) + "]");
      k.set(*pos);
    }
    return k;
  }

  IndexMemoryStats memory_stats() const {
    IndexMemoryStats s;
    const auto& d = *data_;
    const std::size_t n = d.ordered.n();
    s.key_bound = key_bound(d.sets.d(), d.sets.s2());
    for (Vertex x = 0; x < n; ++x) {
      const std::size_t keys = d.heads[x].keys;
      s.total_keys += keys;
      s.total_key_bits += keys * d.heads[x].bits;
      s.max_keys_per_vertex = std::max(s.max_keys_per_vertex, keys);
      const auto counts = entry(x).counts();
      s.total_count = std::accumulate(counts.begin(), counts.end(), s.total_count);
    }
    s.bytes = d.words.size() * sizeof(Block) + d.heads.size() * sizeof(Head);
    return s;
  }

  const OrderedGraph& ordered_graph() const { return data_->ordered; }
  const TwoReachSets& reach() const { return data_->sets; }
  std::size_t n() const { return data_->ordered.n(); }

  bool same_as(const TraceIndex& other) const { return data_ == other.data_; }

 private:
  void check_vertex(Vertex x) const {
    if (x >= data_->ordered.n()) throw std::out_of_range("unknown vertex id " + std::to_string(x));
  }

  struct Head {
    std::uint64_t offset = 0;  // into words
    std::uint32_t keys = 0;
    std::uint32_t bits = 0;  // |closed(x)|
  };

  struct Data {
    OrderedGraph ordered;
    TwoReachSets sets;
    std::vector<Head> heads;
    std::vector<std::uint64_t> words;
  };

  std::shared_ptr<const Data> data_ = std::make_shared<const Data>();
};

}  // namespace ntrace
