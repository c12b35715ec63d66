#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kst/base_surmise.hpp"
#include "kst/detail/next_closure.hpp"
#include "kst/strings.hpp"
#include "kst/structures.hpp"

namespace kst {

/// A query (A, q): does failing every item of A entail failing q?
struct Query {
  State antecedent;
  std::size_t item;
  friend bool operator==(const Query&, const Query&) = default;
};

struct QueryLess {
  bool operator()(const Query& a, const Query& b) const {
    if (a.antecedent != b.antecedent) return canonical_less(a.antecedent, b.antecedent);
    return a.item < b.item;
  }
};

/// Positive and negative answers. Pairs with the item inside the
/// antecedent are trivially positive and never stored.
struct QueryRelation {
  std::set<Query, QueryLess> positives;
  std::set<Query, QueryLess> negatives;

  void add(const Query& q, bool positive) {
    if (q.antecedent.test(q.item)) fail(ErrorCode::ItemInAntecedent, "query item lies in its antecedent");
    (positive ? negatives : positives).erase(q);
    (positive ? positives : negatives).insert(q);
  }
  bool is_positive(const Query& q) const { return q.antecedent.test(q.item) || positives.count(q) != 0; }
};

/// Members of the family with A ∩ K = ∅ and q ∈ K.
inline std::vector<State> removal_set(const StateFamily& f, const State& a, std::size_t q) {
  if (a.test(q)) fail(ErrorCode::ItemInAntecedent, "item " + f.domain().item(q) + " lies in the antecedent");
  std::vector<State> out;
  for (const auto& k : f)
    if (!k.intersects(a) && k.test(q)) out.push_back(k);
  return out;
}

inline StateFamily remove_states(const StateFamily& f, const std::vector<State>& gone) {
  std::unordered_map<State, char, StateHash> drop;
  for (const auto& g : gone) drop.emplace(g, 1);
  std::vector<State> keep;
  for (const auto& k : f)
    if (!drop.count(k)) keep.push_back(k);
  return StateFamily(f.domain_ptr(), std::move(keep));
}

/// All K with: A ∩ K = ∅ implies q ∉ K, for every positive (A, q).
inline KnowledgeStructure entailed_space(DomainPtr domain, const QueryRelation& rel) {
  const auto n = domain->size();
  auto interior = [&](State x) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& p : rel.positives) {
        if (x.test(p.item) && !p.antecedent.intersects(x)) {
          x.reset(p.item);
          changed = true;
        }
      }
    }
    return x;
  };
  return KnowledgeStructure(domain, detail::enumerate_interior_fixed_points(n, interior));
}

/// Every positive (B, r), r not in B, satisfied by all states.
inline QueryRelation space_to_entailment(const KnowledgeStructure& space) {
  require_union_closed(space);
  const auto n = space.domain().size();
  if (n > 20) fail(ErrorCode::BadRequest, "entailment table of more than 20 items requested");
  QueryRelation rel;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      if (mask >> r & 1U) continue;
      State b(n);
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1U) b.set(i);
      bool holds = true;
      for (const auto& k : space)
        if (!k.intersects(b) && k.test(r)) {
          holds = false;
          break;
        }
      if (holds) rel.positives.insert({b, r});
    }
  }
  return rel;
}

// ---------------------------------------------------------------------------
// Hanging states and the adapted guard

struct HangingReport {
  std::vector<State> hanging;
  std::vector<State> almost_hanging;
};

inline HangingReport hanging_states(const StateFamily& f) {
  HangingReport out;
  for (const auto& k : f) {
    if (k.none()) continue;
    const auto inner = inner_fringe(f, k).count();
    if (inner == 0) out.hanging.push_back(k);
    else if (inner == 1 && k.count() > 1) out.almost_hanging.push_back(k);
  }
  return out;
}

struct GuardResult {
  bool allowed = true;
  std::optional<State> witness;  // almost hanging L with A ∩ L = inner fringe of L and q in L
};

/// Whether removing D(A, q) from a learning space leaves a learning space.
inline GuardResult adapted_guard(const KnowledgeStructure& space, const State& a, std::size_t q) {
  if (!is_learning_space(space)) fail(ErrorCode::NotLearningSpace, "the guard needs a learning space");
  if (a.test(q)) fail(ErrorCode::ItemInAntecedent, "item " + space.domain().item(q) + " lies in the antecedent");
  for (const auto& l : hanging_states(space).almost_hanging) {
    if (l.test(q) && (a & l) == inner_fringe(space, l)) return {false, l};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Gradations and the largest learning subspace

struct GradationEnumeration {
  std::vector<std::vector<State>> chains;
  BigCount total = 0;
};

/// Unit-step chains from the empty set to Q; these match the learning
/// strings one to one.
inline GradationEnumeration gradations(const StateFamily& f, std::size_t limit = SIZE_MAX) {
  auto strings = learning_strings(f, limit);
  GradationEnumeration out;
  out.total = strings.total;
  const auto n = f.domain().size();
  for (const auto& w : strings.strings) {
    std::vector<State> chain;
    for (std::size_t k = 0; k <= n; ++k) chain.push_back(prefix_set(w, n, k));
    out.chains.push_back(std::move(chain));
  }
  return out;
}

/// States lying on some gradation: reachable from the empty set by adding
/// items one at a time and from Q by removing them. nullopt when Q cannot
/// be reached, i.e. no learning space lies inside the space.
inline std::optional<KnowledgeStructure> largest_learning_subspace(const StateFamily& space) {
  require_union_closed(space);
  const auto n = space.domain().size();
  const auto& s = space.states();
  std::vector<char> fwd(s.size(), 0), bwd(s.size(), 0);
  auto root = space.index_of(space.domain().empty_state());
  auto top = space.index_of(space.domain().full_state());
  if (!root || !top) return std::nullopt;
  fwd[*root] = 1;
  for (std::size_t i = 0; i < s.size(); ++i) {  // canonical order: sizes increase
    if (!fwd[i]) continue;
    for (std::size_t q = 0; q < n; ++q)
      if (!s[i].test(q))
        if (auto j = space.index_of(s[i].with(q))) fwd[*j] = 1;
  }
  if (!fwd[*top]) return std::nullopt;
  bwd[*top] = 1;
  for (std::size_t i = s.size(); i-- > 0;) {
    if (!bwd[i]) continue;
    s[i].for_each([&](std::size_t q) {
      if (auto j = space.index_of(s[i].without(q))) bwd[*j] = 1;
    });
  }
  std::vector<State> keep;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (fwd[i] && bwd[i]) keep.push_back(s[i]);
  return KnowledgeStructure(space.domain_ptr(), std::move(keep));
}

// ---------------------------------------------------------------------------
// Oracles

struct OracleAnswer {
  Query query;
  bool positive;
};

/// Answers queries; every answer is logged.
class QueryOracle {
 public:
  using Fn = std::function<bool(const State&, std::size_t)>;

  QueryOracle(std::string kind, Fn fn) : kind_(std::move(kind)), fn_(std::move(fn)) {}

  bool ask(const State& a, std::size_t q) {
    bool r = fn_(a, q);
    log_.push_back({{a, q}, r});
    return r;
  }

  const std::string& kind() const { return kind_; }
  const std::vector<OracleAnswer>& log() const { return log_; }
  std::size_t calls() const { return log_.size(); }

  /// Answers exactly as the entailment of `space` dictates.
  static QueryOracle truthful(const KnowledgeStructure& space) {
    return QueryOracle("truthful", [space](const State& a, std::size_t q) {
      for (const auto& k : space)
        if (!k.intersects(a) && k.test(q)) return false;
      return true;
    });
  }

  /// Answers from a fixed table; unlisted queries get `fallback` or fail.
  static QueryOracle scripted(std::vector<OracleAnswer> script, std::optional<bool> fallback = std::nullopt) {
    auto table = std::make_shared<std::map<Query, bool, QueryLess>>();
    for (const auto& s : script) (*table)[s.query] = s.positive;
    return QueryOracle("scripted", [table, fallback](const State& a, std::size_t q) {
      auto it = table->find({a, q});
      if (it != table->end()) return it->second;
      if (fallback) return *fallback;
      fail(ErrorCode::OracleFailure, "the script has no answer for this query");
    });
  }

  /// Positive when P(q failed | every item of A failed) > theta over the
  /// response vectors (sets of correctly answered items). Fewer than
  /// `min_count` matching vectors gives a negative answer.
  static QueryOracle data(std::vector<State> responses, double theta, std::size_t min_count = 30) {
    if (!(theta > 0 && theta < 1)) fail(ErrorCode::InvalidProbability, "theta must lie in (0,1)");
    auto shared = std::make_shared<const std::vector<State>>(std::move(responses));
    return QueryOracle("data", [shared, theta, min_count](const State& a, std::size_t q) {
      std::size_t support = 0, failed = 0;
      for (const auto& r : *shared) {
        if (r.intersects(a)) continue;
        ++support;
        if (!r.test(q)) ++failed;
      }
      if (support < min_count) return false;
      return static_cast<double>(failed) / static_cast<double>(support) > theta;
    });
  }

 private:
  std::string kind_;
  Fn fn_;
  std::vector<OracleAnswer> log_;
};

// ---------------------------------------------------------------------------
// QUERY routines

enum class QuerySource { Asked, Inferred, Deferred, Applied };

inline const char* to_string(QuerySource s) {
  switch (s) {
    case QuerySource::Asked: return "asked";
    case QuerySource::Inferred: return "inferred";
    case QuerySource::Deferred: return "deferred";
    case QuerySource::Applied: return "applied";
  }
  return "?";
}

struct QueryRecord {
  Query query;
  bool positive;
  QuerySource source;
};

struct AuditEntry {
  Query query;
  std::vector<State> removed;
  bool fatal = false;  // adjusted routine: the removal left no learning space
};

struct BuildState {
  KnowledgeStructure current;
  std::deque<Query> pending;
  std::vector<AuditEntry> audit;
  std::vector<QueryRecord> log;
  bool exited = false;  // adjusted routine stopped on a fatal query
  std::size_t oracle_calls = 0;
};

struct Block1Options {
  /// Treat the answers as a partial order: a positive (r, q) implies a
  /// negative (q, r) without asking.
  bool infer_antisymmetry = false;
};

namespace detail {

/// Block 1 with its log; the space is the ideal family of the closure.
inline std::pair<KnowledgeStructure, std::vector<QueryRecord>> block1(DomainPtr domain, QueryOracle& oracle,
                                                                      Block1Options opt) {
  const auto n = domain->size();
  QuasiOrder pos(domain);  // pos.related(r, q): failing r entails failing q
  std::vector<std::vector<char>> neg(n, std::vector<char>(n, 0));
  std::vector<QueryRecord> log;
  auto single = [&](std::size_t r) { return State::from_indices(n, {r}); };

  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t q = 0; q < n; ++q) {
      if (r == q) continue;
      const Query query{single(r), q};
      if (pos.related(r, q)) {
        log.push_back({query, true, QuerySource::Inferred});
        continue;
      }
      if (neg[r][q]) {
        log.push_back({query, false, QuerySource::Inferred});
        continue;
      }
      // A positive answer would force (x, y) for every x before r and y
      // after q; a known negative among them settles the query.
      bool contradiction = false;
      for (std::size_t x = 0; x < n && !contradiction; ++x) {
        if (!pos.related(x, r)) continue;
        pos.successors(q).for_each([&](std::size_t y) {
          if (neg[x][y]) contradiction = true;
        });
      }
      if (contradiction) {
        neg[r][q] = 1;
        log.push_back({query, false, QuerySource::Inferred});
        continue;
      }
      const bool answer = oracle.ask(query.antecedent, q);
      log.push_back({query, answer, QuerySource::Asked});
      if (answer) {
        pos.relate(r, q);
        pos = pos.closure();
        if (opt.infer_antisymmetry) {
          for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
              if (x != y && pos.related(x, y) && !pos.related(y, x)) neg[y][x] = 1;
        }
      } else {
        neg[r][q] = 1;
      }
    }
  }
  return {quasi_order_to_space(pos), std::move(log)};
}

template <typename F>
void for_each_subset_of_size(std::size_t n, std::size_t k, F&& f) {
  // Canonical order within one size: lexicographic on sorted item lists.
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    f(State::from_indices(n, std::span<const std::size_t>(idx.data(), idx.size())));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Block 1: item-pair queries, transitive inference, quasi-ordinal space.
inline KnowledgeStructure block1_build(DomainPtr domain, QueryOracle& oracle, Block1Options opt = {}) {
  return detail::block1(std::move(domain), oracle, opt).first;
}

/// Block 1, then Blocks 2..block_limit with |A| = block number. A positive
/// answer is applied only when the guard allows; blocked queries wait in a
/// FIFO and are retried after every successful removal.
inline BuildState adapted_query_run(DomainPtr domain, QueryOracle& oracle, std::size_t block_limit,
                                    Block1Options opt = {}) {
  const auto n = domain->size();
  auto [space, log] = detail::block1(domain, oracle, opt);
  BuildState st{space, {}, {}, std::move(log), false, 0};
  if (!is_learning_space(st.current))
    fail(ErrorCode::NotLearningSpace, "Block 1 produced a space that is not a learning space");

  auto try_apply = [&](const Query& qu) -> int {  // 1 applied, 0 blocked, -1 no-op
    auto gone = removal_set(st.current, qu.antecedent, qu.item);
    if (gone.empty()) return -1;
    if (!adapted_guard(st.current, qu.antecedent, qu.item).allowed) return 0;
    st.current = KnowledgeStructure(remove_states(st.current, gone));
    st.audit.push_back({qu, std::move(gone), false});
    return 1;
  };
  auto retry_pending = [&] {
    for (bool again = true; again;) {
      again = false;
      for (std::size_t i = 0; i < st.pending.size(); ++i) {
        const Query qu = st.pending[i];
        int r = try_apply(qu);
        if (r == 0) continue;
        st.pending.erase(st.pending.begin() + static_cast<std::ptrdiff_t>(i));
        st.log.push_back({qu, true, r == 1 ? QuerySource::Applied : QuerySource::Inferred});
        if (r == 1) {
          again = true;
          break;
        }
        --i;
      }
    }
  };

  for (std::size_t k = 2; k <= block_limit && k < n; ++k) {
    detail::for_each_subset_of_size(n, k, [&](const State& a) {
      for (std::size_t q = 0; q < n; ++q) {
        if (a.test(q)) continue;
        const Query qu{a, q};
        if (removal_set(st.current, a, q).empty()) {
          st.log.push_back({qu, true, QuerySource::Inferred});
          continue;
        }
        const bool answer = oracle.ask(a, q);
        st.log.push_back({qu, answer, QuerySource::Asked});
        if (!answer) continue;
        int r = try_apply(qu);
        if (r == 1) {
          st.log.push_back({qu, true, QuerySource::Applied});
          retry_pending();
        } else if (r == 0) {
          st.pending.push_back(qu);
          st.log.push_back({qu, true, QuerySource::Deferred});
        }
      }
    });
  }
  st.oracle_calls = oracle.calls();
  return st;
}

/// Block 1, then per positive (A, q): K = L \ D(A, q); when K holds no
/// learning space the routine exits with L, otherwise L becomes the
/// largest learning space inside K.
inline BuildState adjusted_query_run(DomainPtr domain, QueryOracle& oracle, std::size_t block_limit,
                                     Block1Options opt = {}) {
  const auto n = domain->size();
  auto [space, log] = detail::block1(domain, oracle, opt);
  auto start = largest_learning_subspace(space);
  if (!start) fail(ErrorCode::NotLearningSpace, "Block 1 produced a space containing no learning space");
  BuildState st{*start, {}, {}, std::move(log), false, 0};

  for (std::size_t k = 2; k <= block_limit && k < n && !st.exited; ++k) {
    detail::for_each_subset_of_size(n, k, [&](const State& a) {
      for (std::size_t q = 0; q < n && !st.exited; ++q) {
        if (a.test(q)) continue;
        const Query qu{a, q};
        auto gone = removal_set(st.current, a, q);
        if (gone.empty()) {
          st.log.push_back({qu, true, QuerySource::Inferred});
          continue;
        }
        const bool answer = oracle.ask(a, q);
        st.log.push_back({qu, answer, QuerySource::Asked});
        if (!answer) continue;
        auto next = largest_learning_subspace(remove_states(st.current, gone));
        if (!next) {
          st.audit.push_back({qu, std::move(gone), true});
          st.exited = true;
          return;
        }
        std::vector<State> removed;
        for (const auto& s : st.current)
          if (!next->contains(s)) removed.push_back(s);
        st.current = *next;
        st.audit.push_back({qu, std::move(removed), false});
        st.log.push_back({qu, true, QuerySource::Applied});
      }
    });
  }
  st.oracle_calls = oracle.calls();
  return st;
}

}  // namespace kst
