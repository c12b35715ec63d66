#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kst/family.hpp"

namespace kst {

struct PropertyFlags {
  bool union_closed = false;
  bool intersection_closed = false;
  bool well_graded = false;
  bool accessible = false;
  bool discriminative = false;
  bool learning_space = false;
  bool finite_space = true;

  bool quasi_ordinal() const { return union_closed && intersection_closed; }
  bool ordinal() const { return quasi_ordinal() && discriminative; }
};

struct FringePair {
  State inner;
  State outer;
  friend bool operator==(const FringePair&, const FringePair&) = default;
};

// ---------------------------------------------------------------------------
// Family-level predicates. These accept any family, including children that
// lack the empty set.

/// The union of any two members is a member.
inline bool is_union_stable(const StateFamily& f) {
  const auto& s = f.states();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (!f.contains(s[i] | s[j])) return false;
  return true;
}

/// Closed under arbitrary unions, the empty union included.
inline bool is_union_closed(const StateFamily& f) {
  return f.contains(f.domain().empty_state()) && is_union_stable(f);
}

inline bool is_intersection_closed(const StateFamily& f) {
  const auto& s = f.states();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (!f.contains(s[i] & s[j])) return false;
  return true;
}

/// First pair of members not joined by a tight unit-step path, if any.
/// A tight path exists for every pair iff from each K one can always step to
/// a member one item closer to L, which is what is checked.
inline std::optional<std::pair<State, State>> well_graded_violation(const StateFamily& f) {
  const auto& s = f.states();
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      const State diff = s[i] ^ s[j];
      bool step = false;
      diff.for_each([&](std::size_t q) {
        if (step) return;
        State next = s[i];
        if (next.test(q)) next.reset(q); else next.set(q);
        if (f.contains(next)) step = true;
      });
      if (!step) return std::make_pair(s[i], s[j]);
    }
  }
  return std::nullopt;
}

inline bool is_well_graded(const StateFamily& f) { return !well_graded_violation(f).has_value(); }

/// Every non-empty member has an item whose removal stays in the family.
inline bool is_accessible(const StateFamily& f) {
  for (const auto& k : f) {
    if (k.none()) continue;
    bool ok = false;
    k.for_each([&](std::size_t q) {
      if (!ok && f.contains(k.without(q))) ok = true;
    });
    if (!ok) return false;
  }
  return true;
}

/// The states containing item q, as a bit mask over state indices.
inline std::vector<bool> states_containing(const StateFamily& f, std::size_t q) {
  std::vector<bool> mask(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) mask[i] = f.state(i).test(q);
  return mask;
}

inline bool is_discriminative(const StateFamily& f) {
  const auto n = f.domain().size();
  std::vector<std::vector<bool>> masks;
  masks.reserve(n);
  for (std::size_t q = 0; q < n; ++q) masks.push_back(states_containing(f, q));
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t r = q + 1; r < n; ++r)
      if (masks[q] == masks[r]) return false;
  return true;
}

/// Condition (c) of the antimatroid characterization: whenever K+q and K+r
/// are states, so is K+q+r.
inline bool satisfies_pairwise_extension(const StateFamily& f) {
  const auto n = f.domain().size();
  for (const auto& k : f) {
    std::vector<std::size_t> ext;
    for (std::size_t q = 0; q < n; ++q)
      if (!k.test(q) && f.contains(k.with(q))) ext.push_back(q);
    for (std::size_t a = 0; a < ext.size(); ++a)
      for (std::size_t b = a + 1; b < ext.size(); ++b)
        if (!f.contains(k.with(ext[a]).with(ext[b]))) return false;
  }
  return true;
}

/// Learning-space test through finiteness, downgradability and pairwise
/// extension.
inline bool is_learning_space(const StateFamily& f) {
  return f.contains(f.domain().empty_state()) && f.contains(f.domain().full_state()) &&
         is_accessible(f) && satisfies_pairwise_extension(f);
}

inline PropertyFlags classify(const KnowledgeStructure& k) {
  PropertyFlags p;
  p.union_closed = is_union_closed(k);
  p.intersection_closed = is_intersection_closed(k);
  p.well_graded = is_well_graded(k);
  p.accessible = is_accessible(k);
  p.discriminative = is_discriminative(k);
  p.finite_space = true;
  p.learning_space = is_learning_space(k);
  return p;
}

// ---------------------------------------------------------------------------
// Learning smoothness / learning consistency checked straight from their
// definitions.

struct L1Result {
  bool holds = true;
  std::optional<std::pair<State, State>> witness;  // K subset of L with no unit chain
};

struct L2Result {
  bool holds = true;
  struct Witness {
    State k;
    State l;
    std::size_t item;
  };
  std::optional<Witness> witness;
};

struct LearningAxioms {
  L1Result l1;
  L2Result l2;
};

inline LearningAxioms check_l1_l2(const StateFamily& f) {
  LearningAxioms out;
  const auto& s = f.states();
  const auto n = f.domain().size();
  for (std::size_t i = 0; i < s.size() && out.l1.holds; ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!s[i].is_proper_subset_of(s[j])) continue;
      // A chain from K to L exists iff every such pair admits a first step.
      bool step = false;
      (s[j] - s[i]).for_each([&](std::size_t q) {
        if (!step && f.contains(s[i].with(q))) step = true;
      });
      if (!step) {
        out.l1.holds = false;
        out.l1.witness = std::make_pair(s[i], s[j]);
        break;
      }
    }
  }
  for (std::size_t i = 0; i < s.size() && out.l2.holds; ++i) {
    for (std::size_t j = 0; j < s.size() && out.l2.holds; ++j) {
      if (!s[i].is_proper_subset_of(s[j])) continue;
      for (std::size_t q = 0; q < n; ++q) {
        if (s[j].test(q)) continue;
        if (f.contains(s[i].with(q)) && !f.contains(s[j].with(q))) {
          out.l2.holds = false;
          out.l2.witness = L2Result::Witness{s[i], s[j], q};
          break;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Edges (K, L) of the covering relation, ordered by the canonical index of
/// K then of L.
inline std::vector<std::pair<State, State>> covering_diagram(const StateFamily& f) {
  std::vector<std::pair<State, State>> edges;
  const auto& s = f.states();
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<std::size_t> above;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s[i].is_proper_subset_of(s[j])) above.push_back(j);
    for (auto j : above) {
      bool covered = true;
      for (auto a : above) {
        if (a != j && s[a].is_proper_subset_of(s[j])) {
          covered = false;
          break;
        }
      }
      if (covered) edges.emplace_back(s[i], s[j]);
    }
  }
  return edges;
}

inline State inner_fringe(const StateFamily& f, const State& k) {
  State out(k.width());
  k.for_each([&](std::size_t q) {
    if (f.contains(k.without(q))) out.set(q);
  });
  return out;
}

inline State outer_fringe(const StateFamily& f, const State& k) {
  State out(k.width());
  for (std::size_t q = 0; q < k.width(); ++q)
    if (!k.test(q) && f.contains(k.with(q))) out.set(q);
  return out;
}

inline FringePair fringes(const StateFamily& f, const State& k) {
  if (!f.contains(k)) fail(ErrorCode::StateNotInStructure, f.domain().format(k) + " is not a state");
  return {inner_fringe(f, k), outer_fringe(f, k)};
}

/// Recovers the state with the given fringes. More than one match means the
/// structure is not a learning space.
inline State state_from_fringes(const StateFamily& f, const FringePair& pair) {
  std::optional<State> found;
  for (const auto& k : f) {
    if (inner_fringe(f, k) == pair.inner && outer_fringe(f, k) == pair.outer) {
      if (found)
        fail(ErrorCode::MultipleMatches, "fringes shared by " + f.domain().format(*found) + " and " +
                                             f.domain().format(k));
      found = k;
    }
  }
  if (!found)
    fail(ErrorCode::NoMatch, "no state has inner fringe " + f.domain().format(pair.inner) +
                                 " and outer fringe " + f.domain().format(pair.outer));
  return *found;
}

}  // namespace kst
