#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ntrace {

using Block = std::uint64_t;
inline constexpr std::size_t kBlockBits = 64;

constexpr std::size_t blocks_for(std::size_t bits) { return (bits + kBlockBits - 1) / kBlockBits; }

inline void set_bit(std::span<Block> blocks, std::size_t i) { blocks[i / kBlockBits] |= Block{1} << (i % kBlockBits); }
inline void clear_bit(std::span<Block> blocks, std::size_t i) {
  blocks[i / kBlockBits] &= ~(Block{1} << (i % kBlockBits));
}
inline bool test_bit(std::span<const Block> blocks, std::size_t i) {
  return (blocks[i / kBlockBits] >> (i % kBlockBits)) & 1U;
}

/// Calls f(i) for every set bit, ascending.
template <class F>
inline void for_each_bit(std::span<const Block> blocks, F&& f) {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Block word = blocks[b];
    while (word) {
      f(b * kBlockBits + static_cast<std::size_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
}

inline std::size_t popcount(std::span<const Block> blocks) {
  std::size_t c = 0;
  for (Block w : blocks) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

inline std::uint64_t hash_blocks(std::span<const Block> blocks) {
  std::uint64_t h = 0x84222325cbf29ce4ULL ^ blocks.size();
  for (Block w : blocks) {
    h ^= w;
    h *= 0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
  }
  h ^= h >> 32;
  h *= 0xD6E8FEB86659FD93ULL;
  h ^= h >> 32;
  return h;
}

/// Non-owning view of a subset of some ground set, one bit per element.
struct BitKeyView {
  std::span<const Block> blocks;
  std::size_t bits = 0;

  bool test(std::size_t i) const { return test_bit(blocks, i); }
  std::size_t count() const { return popcount(blocks); }

  friend bool operator==(const BitKeyView& a, const BitKeyView& b) {
    return a.bits == b.bits && std::equal(a.blocks.begin(), a.blocks.end(), b.blocks.begin(), b.blocks.end());
  }
};

/// Owning bit vector of fixed length over a ground set.
class BitKey {
 public:
  BitKey() = default;
  explicit BitKey(std::size_t bits) : blocks_(blocks_for(bits), 0), bits_(bits) {}
  explicit BitKey(BitKeyView view) : blocks_(view.blocks.begin(), view.blocks.end()), bits_(view.bits) {}

  void set(std::size_t i) { set_bit(blocks_, i); }
  void reset(std::size_t i) { clear_bit(blocks_, i); }
  bool test(std::size_t i) const { return test_bit(blocks_, i); }
  std::size_t size() const { return bits_; }
  std::size_t count() const { return popcount(blocks_); }

  std::span<const Block> blocks() const { return blocks_; }
  BitKeyView view() const { return {blocks_, bits_}; }

  friend bool operator==(const BitKey&, const BitKey&) = default;

 private:
  std::vector<Block> blocks_;
  std::size_t bits_ = 0;
};

namespace detail {

// Open-addressing map from variable-width block sequences to signed
// counters. Keys live in one arena; clear() is O(1) amortised through slot
// generations, so one instance can be reused across many queries.
class BlockCounter {
 public:
  explicit BlockCounter(std::size_t expected = 16) { rehash(std::bit_ceil(std::max<std::size_t>(expected * 2, 16))); }

  void clear() {
    if (++generation_ == 0) {
      slots_.assign(slots_.size(), Slot{});
      generation_ = 1;
    }
    arena_.clear();
    size_ = 0;
    live_.clear();
  }

  void reserve(std::size_t expected) {
    if (expected * 2 > slots_.size()) rehash(std::bit_ceil(expected * 2));
  }

  void add(std::span<const Block> key, std::int64_t delta) { slot_for(key).value += delta; }

  std::int64_t get(std::span<const Block> key) const {
    const std::uint64_t h = hash_blocks(key);
    std::size_t i = h & mask_;
    while (slots_[i].generation == generation_) {
      const Slot& s = slots_[i];
      if (s.hash == h && matches(s, key)) return s.value;
      i = (i + 1) & mask_;
    }
    return 0;
  }

  std::size_t size() const { return size_; }

  /// f(std::span<const Block> key, std::int64_t value) in insertion order.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t idx : live_) {
      const Slot& s = slots_[idx];
      f(std::span<const Block>(arena_.data() + s.offset, s.length), s.value);
    }
  }

 private:
  struct Slot {
    std::uint64_t hash = 0;
    std::size_t offset = 0;
    std::uint32_t length = 0;
    std::uint32_t generation = 0;
    std::int64_t value = 0;
  };

  bool matches(const Slot& s, std::span<const Block> key) const {
    return s.length == key.size() && std::equal(key.begin(), key.end(), arena_.begin() + static_cast<std::ptrdiff_t>(s.offset));
  }

  Slot& slot_for(std::span<const Block> key) {
    if ((size_ + 1) * 2 > slots_.size()) rehash(slots_.size() * 2);
    const std::uint64_t h = hash_blocks(key);
    std::size_t i = h & mask_;
    while (slots_[i].generation == generation_) {
      Slot& s = slots_[i];
      if (s.hash == h && matches(s, key)) return s;
      i = (i + 1) & mask_;
    }
    Slot& s = slots_[i];
    s.hash = h;
    s.offset = arena_.size();
    s.length = static_cast<std::uint32_t>(key.size());
    s.generation = generation_;
    s.value = 0;
    arena_.insert(arena_.end(), key.begin(), key.end());
    ++size_;
    live_.push_back(i);
    return s;
  }

  void rehash(std::size_t capacity) {
    std::vector<Slot> old;
    old.swap(slots_);
    std::vector<std::size_t> old_live;
    old_live.swap(live_);
    const std::uint32_t old_generation = generation_;
    slots_.assign(capacity, Slot{});
    mask_ = capacity - 1;
    generation_ = 1;
    for (std::size_t idx : old_live) {
      const Slot& s = old[idx];
      if (s.generation != old_generation) continue;
      std::size_t i = s.hash & mask_;
      while (slots_[i].generation == generation_) i = (i + 1) & mask_;
      slots_[i] = s;
      slots_[i].generation = generation_;
      live_.push_back(i);
    }
  }

  std::vector<Slot> slots_;
  std::vector<Block> arena_;
  std::vector<std::size_t> live_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
  std::uint32_t generation_ = 1;
};

}  // namespace detail
}  // namespace ntrace

template <>
struct std::hash<ntrace::BitKey> {
  std::size_t operator()(const ntrace::BitKey& k) const noexcept { return ntrace::hash_blocks(k.blocks()); }
};
