#pragma once

#include <map>
#include <string>
#include <vector>

#include "kst/family.hpp"
#include "kst/structures.hpp"

namespace kst {

/// Re-encodes the part of `s` lying on `items` (parent indices, in order)
/// as a state over a domain of |items| positions.
inline State restrict_to(const State& s, const std::vector<std::size_t>& items) {
  State out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    if (s.test(items[i])) out.set(i);
  return out;
}

/// Inverse of restrict_to: lifts a sub-domain state back to parent width.
inline State lift_from(const State& s, const std::vector<std::size_t>& items, std::size_t parent_width) {
  State out(parent_width);
  s.for_each([&](std::size_t i) { out.set(items.at(i)); });
  return out;
}

inline DomainPtr sub_domain_of(const Domain& parent, const std::vector<std::size_t>& items) {
  std::vector<std::string> names;
  names.reserve(items.size());
  for (auto i : items) names.push_back(parent.item(i));
  return make_domain(std::move(names));
}

struct ProjectionResult {
  DomainPtr sub_domain;
  std::vector<std::size_t> sub_items;  // parent index of each sub-domain item
  KnowledgeStructure structure;        // the traces
  std::vector<std::size_t> trace_of;   // parent state index -> trace index
};

namespace detail {

/// Projection without the proper-subset requirement; projecting on the whole
/// domain gives the structure back.
inline ProjectionResult project_onto(const KnowledgeStructure& parent, const State& sub) {
  ProjectionResult r;
  r.sub_items = sub.indices();
  r.sub_domain = sub_domain_of(parent.domain(), r.sub_items);
  std::vector<State> traces;
  traces.reserve(parent.size());
  for (const auto& k : parent) traces.push_back(restrict_to(k, r.sub_items));
  r.structure = KnowledgeStructure(r.sub_domain, traces);
  r.trace_of.reserve(parent.size());
  for (const auto& t : traces) r.trace_of.push_back(*r.structure.index_of(t));
  return r;
}

}  // namespace detail

inline void require_proper_subdomain(const Domain& domain, const State& sub) {
  if (sub.width() != domain.size()) fail(ErrorCode::WidthMismatch, "sub-domain has the wrong width");
  if (sub.none() || sub.count() == domain.size())
    fail(ErrorCode::EmptyOrFullSubdomain, "sub-domain must be a proper non-empty subset, got " + domain.format(sub));
}

/// Traces K ∩ Q' of every state on the proper non-empty subset Q'.
inline ProjectionResult project(const KnowledgeStructure& parent, const State& sub) {
  require_proper_subdomain(parent.domain(), sub);
  return detail::project_onto(parent, sub);
}

inline ProjectionResult project(const KnowledgeStructure& parent, const std::vector<std::string>& sub) {
  return project(parent, parent.domain().make_state(sub));
}

/// One equivalence class of states sharing a trace, plus its child.
struct ChildFamily {
  State trace;                 // over the projection's sub-domain
  std::vector<State> members;  // parent states, canonical order
  State common;                // intersection of the members (parent width)
  DomainPtr child_domain;      // items outside Q' and outside `common`
  std::vector<std::size_t> child_items;
  StateFamily child;           // members minus `common`, on child_domain

  /// The child as parent-width sets L \ common.
  std::vector<State> child_in_parent() const {
    std::vector<State> out;
    for (const auto& m : members) out.push_back(m - common);
    return out;
  }
};

/// Classes of the relation "same trace on Q'", ordered by trace. Only the
/// class fields are filled; see children() for the shifted families.
inline std::vector<ChildFamily> partition_classes(const KnowledgeStructure& parent, const State& sub) {
  auto proj = project(parent, sub);
  std::vector<ChildFamily> out(proj.structure.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t].trace = proj.structure.state(t);
  for (std::size_t i = 0; i < parent.size(); ++i) out[proj.trace_of[i]].members.push_back(parent.state(i));
  for (auto& cls : out) {
    State common = parent.full_state();
    for (const auto& m : cls.members) common &= m;
    cls.common = common;
  }
  return out;
}

inline std::vector<ChildFamily> partition_classes(const KnowledgeStructure& parent,
                                                  const std::vector<std::string>& sub) {
  return partition_classes(parent, parent.domain().make_state(sub));
}

/// The Q'-children {L \ ∩[K] : L in [K]}, re-encoded on the items that are
/// neither in Q' nor common to the class.
inline std::vector<ChildFamily> children(const KnowledgeStructure& parent, const State& sub) {
  auto classes = partition_classes(parent, sub);
  const auto outside = parent.full_state() - sub;
  for (auto& cls : classes) {
    cls.child_items = (outside - cls.common).indices();
    cls.child_domain = sub_domain_of(parent.domain(), cls.child_items);
    std::vector<State> sets;
    for (const auto& m : cls.members) sets.push_back(restrict_to(m - cls.common, cls.child_items));
    cls.child = StateFamily(cls.child_domain, std::move(sets));
  }
  return classes;
}

inline std::vector<ChildFamily> children(const KnowledgeStructure& parent, const std::vector<std::string>& sub) {
  return children(parent, parent.domain().make_state(sub));
}

}  // namespace kst
