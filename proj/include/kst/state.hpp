#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "kst/error.hpp"

namespace kst {

/// A subset of a domain, stored as a fixed-width bit vector. Bit i is set
/// exactly when item i belongs to the set. Domains up to 128 items live
/// inline; wider ones spill to the heap.
class State {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  State() = default;
  explicit State(std::size_t width)
      : width_(width), words_(word_count(width), Word{0}) {}

  static State full(std::size_t width) {
    State s(width);
    for (auto& w : s.words_) w = ~Word{0};
    s.trim();
    return s;
  }

  static State from_indices(std::size_t width, std::span<const std::size_t> items) {
    State s(width);
    for (auto i : items) s.set(i);
    return s;
  }
  static State from_indices(std::size_t width, std::initializer_list<std::size_t> items) {
    return from_indices(width, std::span<const std::size_t>(items.begin(), items.size()));
  }

  std::size_t width() const noexcept { return width_; }

  bool test(std::size_t i) const noexcept {
    return (words_[i / kWordBits] >> (i % kWordBits)) & Word{1};
  }
  void set(std::size_t i) {
    check_index(i);
    words_[i / kWordBits] |= Word{1} << (i % kWordBits);
  }
  void reset(std::size_t i) {
    check_index(i);
    words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits));
  }

  State with(std::size_t i) const {
    State s = *this;
    s.set(i);
    return s;
  }
  State without(std::size_t i) const {
    State s = *this;
    s.reset(i);
    return s;
  }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool none() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
  }
  bool any() const noexcept { return !none(); }

  bool is_subset_of(const State& other) const {
    check_width(other);
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~other.words_[k]) return false;
    return true;
  }
  bool is_proper_subset_of(const State& other) const {
    return is_subset_of(other) && *this != other;
  }
  bool intersects(const State& other) const {
    check_width(other);
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & other.words_[k]) return true;
    return false;
  }

  State& operator|=(const State& o) { return apply(o, [](Word a, Word b) { return a | b; }); }
  State& operator&=(const State& o) { return apply(o, [](Word a, Word b) { return a & b; }); }
  State& operator^=(const State& o) { return apply(o, [](Word a, Word b) { return a ^ b; }); }
  /// Set difference.
  State& operator-=(const State& o) { return apply(o, [](Word a, Word b) { return a & ~b; }); }

  friend State operator|(State a, const State& b) { return a |= b; }
  friend State operator&(State a, const State& b) { return a &= b; }
  friend State operator^(State a, const State& b) { return a ^= b; }
  friend State operator-(State a, const State& b) { return a -= b; }

  State complement() const {
    State s = *this;
    for (auto& w : s.words_) w = ~w;
    s.trim();
    return s;
  }

  friend bool operator==(const State& a, const State& b) {
    return a.width_ == b.width_ &&
           std::equal(a.words_.begin(), a.words_.end(), b.words_.begin(), b.words_.end());
  }

  /// Calls `f(i)` for every member index in increasing order.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      Word w = words_[k];
      while (w) {
        auto bit = static_cast<std::size_t>(std::countr_zero(w));
        f(k * kWordBits + bit);
        w &= w - 1;
      }
    }
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  /// Index of the lowest member, or width() when empty.
  std::size_t first() const noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k]) return k * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[k]));
    return width_;
  }

  std::size_t hash() const noexcept {
    std::size_t h = width_ * 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) h ^= std::hash<Word>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

  std::span<const Word> words() const noexcept { return {words_.data(), words_.size()}; }

 private:
  static std::size_t word_count(std::size_t width) { return (width + kWordBits - 1) / kWordBits; }

  void check_index(std::size_t i) const {
    if (i >= width_) fail(ErrorCode::UnknownItem, "item index " + std::to_string(i) + " outside width " + std::to_string(width_));
  }
  void check_width(const State& o) const {
    if (o.width_ != width_)
      fail(ErrorCode::WidthMismatch, "states of width " + std::to_string(width_) + " and " + std::to_string(o.width_));
  }
  void trim() {
    if (width_ % kWordBits != 0 && !words_.empty())
      words_.back() &= (Word{1} << (width_ % kWordBits)) - 1;
  }
  template <typename Op>
  State& apply(const State& o, Op op) {
    check_width(o);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] = op(words_[k], o.words_[k]);
    return *this;
  }

  std::size_t width_ = 0;
  boost::container::small_vector<Word, 2> words_;
};

/// Canonical state order: by size, then lexicographically on the sorted item
/// lists (so {a,b} < {a,c} < {b,c}).
inline bool canonical_less(const State& a, const State& b) {
  auto ca = a.count(), cb = b.count();
  if (ca != cb) return ca < cb;
  auto wa = a.words(), wb = b.words();
  for (std::size_t k = 0; k < wa.size() && k < wb.size(); ++k) {
    if (wa[k] == wb[k]) continue;
    auto diff = wa[k] ^ wb[k];
    auto low = diff & (~diff + 1);
    return (wa[k] & low) != 0;
  }
  return false;
}

struct CanonicalLess {
  bool operator()(const State& a, const State& b) const { return canonical_less(a, b); }
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept { return s.hash(); }
};

}  // namespace kst
