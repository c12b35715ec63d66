#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kst/detail/next_closure.hpp"
#include "kst/family.hpp"
#include "kst/structures.hpp"

namespace kst {

// ---------------------------------------------------------------------------
// Span and base

/// All unions of subfamilies of `generators`, the empty union included.
inline StateFamily span_family(DomainPtr domain, const std::vector<State>& generators) {
  const auto n = domain->size();
  auto interior = [&](const State& x) {
    State acc(n);
    for (const auto& g : generators)
      if (g.is_subset_of(x)) acc |= g;
    return acc;
  };
  return StateFamily(domain, detail::enumerate_interior_fixed_points(n, interior));
}

/// Span as a knowledge structure; throws MissingEmptyOrFull when the
/// generators do not cover the domain.
inline KnowledgeStructure span(DomainPtr domain, const std::vector<State>& generators) {
  return KnowledgeStructure(span_family(std::move(domain), generators));
}

inline void require_union_closed(const StateFamily& f) {
  if (!is_union_closed(f)) fail(ErrorCode::NotUnionClosed, "the family is not closed under union");
}

/// The base: states that are not the union of the states they strictly
/// contain.
inline std::vector<State> base(const KnowledgeStructure& space) {
  require_union_closed(space);
  std::vector<State> out;
  const auto& s = space.states();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].none()) continue;
    State below(s[i].width());
    for (std::size_t j = 0; j < i; ++j)  // canonical order puts smaller states first
      if (s[j].is_proper_subset_of(s[i])) below |= s[j];
    if (below != s[i]) out.push_back(s[i]);
  }
  return out;
}

/// Minimal states containing q.
inline std::vector<State> atoms_at(const StateFamily& space, std::size_t q) {
  if (q >= space.domain().size()) fail(ErrorCode::UnknownItem, "item index " + std::to_string(q));
  std::vector<State> containing;
  for (const auto& k : space)
    if (k.test(q)) containing.push_back(k);
  std::vector<State> out;
  for (const auto& k : containing) {
    bool minimal = true;
    for (const auto& other : containing) {
      if (other.is_proper_subset_of(k)) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(k);
  }
  return out;
}

inline std::vector<State> atoms_at(const StateFamily& space, const std::string& item) {
  return atoms_at(space, space.domain().index_of(item));
}

// ---------------------------------------------------------------------------
// Surmise systems

/// Clauses per item (index-aligned with the domain).
struct SurmiseMap {
  DomainPtr domain;
  std::vector<std::vector<State>> clauses;

  const std::vector<State>& clauses_for(std::size_t q) const { return clauses.at(q); }
};

struct SurmiseViolation {
  int axiom;  // 1, 2 or 3
  std::size_t item;
  State clause;
};

/// First violated surmise axiom: (1) q lies in each of its clauses, (2) every
/// item of a clause has a clause inside it, (3) clauses of one item are
/// pairwise incomparable.
inline std::optional<SurmiseViolation> check_surmise_axioms(const SurmiseMap& map) {
  for (std::size_t q = 0; q < map.clauses.size(); ++q) {
    for (const auto& c : map.clauses[q]) {
      if (!c.test(q)) return SurmiseViolation{1, q, c};
      std::optional<SurmiseViolation> v;
      c.for_each([&](std::size_t r) {
        if (v) return;
        bool inside = false;
        for (const auto& c2 : map.clauses[r])
          if (c2.is_subset_of(c)) inside = true;
        if (!inside) v = SurmiseViolation{2, q, c};
      });
      if (v) return v;
      for (const auto& other : map.clauses[q])
        if (other != c && other.is_subset_of(c)) return SurmiseViolation{3, q, c};
    }
  }
  return std::nullopt;
}

inline SurmiseMap surmise_function(const KnowledgeStructure& space) {
  require_union_closed(space);
  SurmiseMap map{space.domain_ptr(), {}};
  for (std::size_t q = 0; q < space.domain().size(); ++q) map.clauses.push_back(atoms_at(space, q));
  return map;
}

/// The knowledge space of all K such that each item of K has a clause
/// inside K. Clause lists need not satisfy the surmise axioms.
inline KnowledgeStructure space_from_attribution(const SurmiseMap& attribution) {
  const auto n = attribution.domain->size();
  if (attribution.clauses.size() != n)
    fail(ErrorCode::EmptyClauseList, "attribution lists " + std::to_string(attribution.clauses.size()) +
                                         " items for a domain of " + std::to_string(n));
  for (std::size_t q = 0; q < n; ++q)
    if (attribution.clauses[q].empty())
      fail(ErrorCode::EmptyClauseList, "item '" + attribution.domain->item(q) + "' has no clause");
  auto interior = [&](State x) {
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t q = 0; q < n; ++q) {
        if (!x.test(q)) continue;
        bool supported = false;
        for (const auto& c : attribution.clauses[q])
          if (c.is_subset_of(x)) {
            supported = true;
            break;
          }
        if (!supported) {
          x.reset(q);
          changed = true;
        }
      }
    }
    return x;
  };
  return KnowledgeStructure(attribution.domain, detail::enumerate_interior_fixed_points(n, interior));
}

// ---------------------------------------------------------------------------
// Quasi orders

/// A binary relation on the domain; `related(q, r)` reads "q precedes r",
/// i.e. mastering r requires mastering q.
class QuasiOrder {
 public:
  QuasiOrder() = default;
  explicit QuasiOrder(DomainPtr domain) : domain_(std::move(domain)) {
    const auto n = domain_->size();
    rows_.assign(n, State(n));
    for (std::size_t q = 0; q < n; ++q) rows_[q].set(q);
  }

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t size() const { return rows_.size(); }

  bool related(std::size_t q, std::size_t r) const { return rows_.at(q).test(r); }
  void relate(std::size_t q, std::size_t r) { rows_.at(q).set(r); }
  void unrelate(std::size_t q, std::size_t r) { rows_.at(q).reset(r); }
  /// Items r with q preceding r.
  const State& successors(std::size_t q) const { return rows_.at(q); }

  bool is_reflexive() const {
    for (std::size_t q = 0; q < size(); ++q)
      if (!related(q, q)) return false;
    return true;
  }
  bool is_transitive() const {
    for (std::size_t q = 0; q < size(); ++q) {
      bool ok = true;
      rows_[q].for_each([&](std::size_t r) {
        if (!rows_[r].is_subset_of(rows_[q])) ok = false;
      });
      if (!ok) return false;
    }
    return true;
  }
  bool is_antisymmetric() const {
    for (std::size_t q = 0; q < size(); ++q)
      for (std::size_t r = q + 1; r < size(); ++r)
        if (related(q, r) && related(r, q)) return false;
    return true;
  }
  bool is_partial_order() const { return is_reflexive() && is_transitive() && is_antisymmetric(); }

  /// Reflexive-transitive closure (Warshall).
  QuasiOrder closure() const {
    QuasiOrder out = *this;
    for (std::size_t q = 0; q < size(); ++q) out.relate(q, q);
    for (std::size_t k = 0; k < size(); ++k)
      for (std::size_t q = 0; q < size(); ++q)
        if (out.related(q, k)) out.rows_[q] |= out.rows_[k];
    return out;
  }

  friend bool operator==(const QuasiOrder& a, const QuasiOrder& b) {
    return *a.domain_ == *b.domain_ && a.rows_ == b.rows_;
  }

 private:
  DomainPtr domain_;
  std::vector<State> rows_;
};

/// Down-closed sets of the order: K is a state iff r in K and q before r
/// imply q in K.
inline KnowledgeStructure quasi_order_to_space(const QuasiOrder& order) {
  if (!order.is_reflexive()) fail(ErrorCode::NotReflexive, "relation is not reflexive");
  if (!order.is_transitive()) fail(ErrorCode::NotTransitive, "relation is not transitive");
  const auto n = order.size();
  std::vector<State> required(n, State(n));  // required[r] = items preceding r
  for (std::size_t q = 0; q < n; ++q)
    order.successors(q).for_each([&](std::size_t r) { required[r].set(q); });
  auto interior = [&](State x) {
    for (bool changed = true; changed;) {
      changed = false;
      x.for_each([&](std::size_t r) {
        if (!required[r].is_subset_of(x)) {
          x.reset(r);
          changed = true;
        }
      });
    }
    return x;
  };
  return KnowledgeStructure(order.domain_ptr(), detail::enumerate_interior_fixed_points(n, interior));
}

/// q precedes r exactly when every state containing r contains q.
inline QuasiOrder space_to_quasi_order(const KnowledgeStructure& space) {
  QuasiOrder order(space.domain_ptr());
  const auto n = space.domain().size();
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t r = 0; r < n; ++r) {
      bool ok = true;
      for (const auto& k : space)
        if (k.test(r) && !k.test(q)) {
          ok = false;
          break;
        }
      if (ok) order.relate(q, r);
    }
  }
  return order;
}

// ---------------------------------------------------------------------------

struct AtomCheck {
  bool holds = true;
  /// An atom serving several items, with those items.
  std::optional<std::pair<State, std::vector<std::size_t>>> shared_atom;
  /// An atom A at q with A minus q outside the space.
  std::optional<std::pair<State, std::size_t>> non_removable;
};

/// Learning-space test through atoms: each atom is an atom at exactly one
/// item. The equivalent "A minus q is a state" condition is evaluated too.
inline AtomCheck ls_check_via_atoms(const KnowledgeStructure& space) {
  require_union_closed(space);
  AtomCheck out;
  const auto n = space.domain().size();
  std::unordered_map<State, std::vector<std::size_t>, StateHash> owners;
  std::vector<State> order;
  for (std::size_t q = 0; q < n; ++q) {
    for (auto& a : atoms_at(space, q)) {
      if (!space.contains(a.without(q)) && !out.non_removable) out.non_removable = std::make_pair(a, q);
      auto [it, inserted] = owners.try_emplace(a);
      if (inserted) order.push_back(a);
      it->second.push_back(q);
    }
  }
  std::sort(order.begin(), order.end(), CanonicalLess{});
  for (const auto& a : order) {
    if (owners[a].size() > 1) {
      out.shared_atom = std::make_pair(a, owners[a]);
      break;
    }
  }
  out.holds = !out.shared_atom.has_value();
  return out;
}

}  // namespace kst
