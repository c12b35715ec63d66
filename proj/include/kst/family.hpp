#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kst/domain.hpp"
#include "kst/error.hpp"
#include "kst/state.hpp"

namespace kst {

/// An immutable, canonically ordered, duplicate-free family of subsets of a
/// domain. Copies share storage.
class StateFamily {
 public:
  StateFamily() : impl_(std::make_shared<Impl>()) {}

  StateFamily(DomainPtr domain, std::vector<State> states) {
    auto impl = std::make_shared<Impl>();
    const auto width = domain->size();
    for (const auto& s : states)
      if (s.width() != width)
        fail(ErrorCode::WidthMismatch, "state of width " + std::to_string(s.width()) +
                                           " in a domain of " + std::to_string(width) + " items");
    std::sort(states.begin(), states.end(), CanonicalLess{});
    auto last = std::unique(states.begin(), states.end());
    impl->had_duplicates = last != states.end();
    states.erase(last, states.end());
    impl->index.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) impl->index.emplace(states[i], i);
    impl->domain = std::move(domain);
    impl->states = std::move(states);
    impl_ = std::move(impl);
  }

  const Domain& domain() const { return *impl_->domain; }
  const DomainPtr& domain_ptr() const { return impl_->domain; }
  std::size_t size() const noexcept { return impl_->states.size(); }
  bool empty() const noexcept { return impl_->states.empty(); }
  const std::vector<State>& states() const noexcept { return impl_->states; }
  const State& state(std::size_t i) const { return impl_->states.at(i); }
  auto begin() const { return impl_->states.begin(); }
  auto end() const { return impl_->states.end(); }

  bool contains(const State& s) const { return impl_->index.count(s) != 0; }
  std::optional<std::size_t> index_of(const State& s) const {
    auto it = impl_->index.find(s);
    if (it == impl_->index.end()) return std::nullopt;
    return it->second;
  }

  /// True when the input list repeated a state (it was deduplicated).
  bool had_duplicates() const noexcept { return impl_->had_duplicates; }

  std::vector<std::vector<std::string>> to_names() const {
    std::vector<std::vector<std::string>> out;
    out.reserve(size());
    for (const auto& s : impl_->states) out.push_back(domain().names(s));
    return out;
  }

  std::string format() const {
    std::string out = "{";
    for (std::size_t i = 0; i < size(); ++i) {
      if (i) out += ", ";
      out += domain().format(impl_->states[i]);
    }
    return out + "}";
  }

  friend bool operator==(const StateFamily& a, const StateFamily& b) {
    return a.domain() == b.domain() && a.states() == b.states();
  }

 private:
  struct Impl {
    DomainPtr domain = std::make_shared<const Domain>();
    std::vector<State> states;
    std::unordered_map<State, std::size_t, StateHash> index;
    bool had_duplicates = false;
  };
  std::shared_ptr<const Impl> impl_;
};

/// A family over a non-empty domain containing both the empty set and the
/// full domain.
class KnowledgeStructure : public StateFamily {
 public:
  KnowledgeStructure() = default;

  KnowledgeStructure(DomainPtr domain, std::vector<State> states)
      : StateFamily(std::move(domain), std::move(states)) {
    validate();
  }

  explicit KnowledgeStructure(const StateFamily& family) : StateFamily(family) { validate(); }

  State empty_state() const { return domain().empty_state(); }
  State full_state() const { return domain().full_state(); }

 private:
  void validate() const {
    if (domain().empty()) fail(ErrorCode::EmptyDomain, "a knowledge structure needs at least one item");
    if (!contains(domain().empty_state()))
      fail(ErrorCode::MissingEmptyOrFull, "the empty state is missing");
    if (!contains(domain().full_state()))
      fail(ErrorCode::MissingEmptyOrFull, "the full domain is missing");
  }
};

/// Builds a structure from item-name lists. Repeated states are dropped
/// (see had_duplicates()); a missing empty or full state is an error.
inline KnowledgeStructure build_structure(DomainPtr domain,
                                          const std::vector<std::vector<std::string>>& states) {
  std::vector<State> bits;
  bits.reserve(states.size());
  for (const auto& names : states) bits.push_back(domain->make_state(names));
  return KnowledgeStructure(std::move(domain), std::move(bits));
}

inline KnowledgeStructure build_structure(const Domain& domain,
                                          const std::vector<std::vector<std::string>>& states) {
  return build_structure(std::make_shared<const Domain>(domain), states);
}

/// Convenience for single-letter domains: each state is a letter string,
/// "" being the empty state.
inline KnowledgeStructure structure_from_letters(std::size_t n, const std::vector<std::string>& states) {
  auto domain = std::make_shared<const Domain>(Domain::letters(n));
  std::vector<State> bits;
  bits.reserve(states.size());
  for (const auto& s : states) bits.push_back(domain->parse_letters(s));
  return KnowledgeStructure(domain, std::move(bits));
}

/// 2^Q over the given domain. Only sensible for small domains.
inline KnowledgeStructure power_set(DomainPtr domain) {
  const auto n = domain->size();
  if (n > 24) fail(ErrorCode::BadRequest, "power set of more than 24 items requested");
  std::vector<State> states;
  states.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    State s(n);
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) s.set(i);
    states.push_back(std::move(s));
  }
  return KnowledgeStructure(std::move(domain), std::move(states));
}

}  // namespace kst
