#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kst/error.hpp"
#include "kst/state.hpp"

namespace kst {

/// The item set Q. Item order is fixed at construction and defines the bit
/// positions of every State over this domain.
class Domain {
 public:
  Domain() = default;

  explicit Domain(std::vector<std::string> items) : items_(std::move(items)) {
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (!index_.emplace(items_[i], i).second)
        fail(ErrorCode::DuplicateItem, "item '" + items_[i] + "' listed twice");
    }
  }

  /// Single-character items "a", "b", ... for the first n letters.
  static Domain letters(std::size_t n) {
    std::vector<std::string> items;
    for (std::size_t i = 0; i < n; ++i) items.emplace_back(1, static_cast<char>('a' + i));
    return Domain(std::move(items));
  }

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const std::string& item(std::size_t i) const { return items_.at(i); }
  const std::vector<std::string>& items() const noexcept { return items_; }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t index_of(const std::string& name) const {
    auto idx = find(name);
    if (!idx) fail(ErrorCode::UnknownItem, "item '" + name + "' is not in the domain");
    return *idx;
  }

  State empty_state() const { return State(size()); }
  State full_state() const { return State::full(size()); }

  State make_state(std::span<const std::string> names) const {
    State s(size());
    for (const auto& n : names) s.set(index_of(n));
    return s;
  }
  State make_state(std::initializer_list<std::string> names) const {
    return make_state(std::span<const std::string>(names.begin(), names.size()));
  }
  /// Parses a compact letter string such as "abd"; only valid when every
  /// item name is one character long.
  State parse_letters(std::string_view letters) const {
    State s(size());
    for (char c : letters) s.set(index_of(std::string(1, c)));
    return s;
  }

  std::vector<std::string> names(const State& s) const {
    std::vector<std::string> out;
    s.for_each([&](std::size_t i) { out.push_back(items_[i]); });
    return out;
  }

  /// "{a,b,d}" style rendering.
  std::string format(const State& s) const {
    std::string out = "{";
    bool first = true;
    s.for_each([&](std::size_t i) {
      if (!first) out += ',';
      out += items_[i];
      first = false;
    });
    return out + "}";
  }

  friend bool operator==(const Domain& a, const Domain& b) { return a.items_ == b.items_; }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

using DomainPtr = std::shared_ptr<const Domain>;

inline DomainPtr make_domain(std::vector<std::string> items) {
  return std::make_shared<const Domain>(std::move(items));
}

}  // namespace kst
