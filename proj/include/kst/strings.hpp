#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kst/base_surmise.hpp"
#include "kst/family.hpp"
#include "kst/random.hpp"
#include "kst/structures.hpp"

namespace kst {

using BigCount = boost::multiprecision::cpp_int;

/// A sequence of distinct item indices. A string is a word of length |Q|.
using Word = std::vector<std::size_t>;

inline Word parse_word(const Domain& domain, const std::vector<std::string>& names) {
  Word w;
  for (const auto& n : names) w.push_back(domain.index_of(n));
  return w;
}

/// Word from a compact letter string such as "bdac".
inline Word parse_word(const Domain& domain, std::string_view letters) {
  Word w;
  for (char c : letters) w.push_back(domain.index_of(std::string(1, c)));
  return w;
}

/// "bdac" for one-letter items, otherwise names separated by spaces.
inline std::string format_word(const Domain& domain, const Word& w) {
  bool compact = std::all_of(domain.items().begin(), domain.items().end(),
                             [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i && !compact) out += ' ';
    out += domain.item(w[i]);
  }
  return out;
}

/// The set of items of the first `len` letters.
inline State prefix_set(const Word& w, std::size_t width, std::size_t len) {
  State s(width);
  for (std::size_t i = 0; i < len; ++i) s.set(w[i]);
  return s;
}

inline State word_set(const Word& w, std::size_t width) { return prefix_set(w, width, w.size()); }

namespace detail {

inline void check_word(const Word& w, std::size_t width, ErrorCode repeated, ErrorCode unknown) {
  State seen(width);
  for (auto q : w) {
    if (q >= width) fail(unknown, "item index " + std::to_string(q) + " outside the domain");
    if (seen.test(q)) fail(repeated, "item index " + std::to_string(q) + " repeated in a word");
    seen.set(q);
  }
}

inline void check_strings(const std::vector<Word>& strings, std::size_t width) {
  if (strings.empty()) fail(ErrorCode::MalformedString, "empty collection of strings");
  for (const auto& s : strings) {
    check_word(s, width, ErrorCode::MalformedString, ErrorCode::MalformedString);
    if (s.size() != width)
      fail(ErrorCode::MalformedString, "string of length " + std::to_string(s.size()) + ", expected " +
                                           std::to_string(width));
  }
}

inline bool has_prefix(const std::vector<Word>& strings, const Word& p) {
  for (const auto& s : strings)
    if (s.size() >= p.size() && std::equal(p.begin(), p.end(), s.begin())) return true;
  return false;
}

}  // namespace detail

inline bool is_learning_word(const StateFamily& f, const Word& w) {
  const auto n = f.domain().size();
  detail::check_word(w, n, ErrorCode::RepeatedItem, ErrorCode::UnknownItem);
  State s(n);
  if (!f.contains(s)) return false;
  for (auto q : w) {
    s.set(q);
    if (!f.contains(s)) return false;
  }
  return true;
}

struct StringEnumeration {
  std::vector<Word> strings;  // at most `limit`, lexicographic by item index
  BigCount total = 0;         // exact number of learning strings
};

namespace detail {

/// Number of unit-step chains from each state up to Q (0 when Q is not
/// reachable). Indexed like the family.
inline std::vector<BigCount> completion_counts(const StateFamily& f) {
  const auto n = f.domain().size();
  const auto& s = f.states();
  std::vector<BigCount> count(s.size());
  for (std::size_t i = s.size(); i-- > 0;) {  // larger states first
    if (s[i].count() == n) {
      count[i] = 1;
      continue;
    }
    for (std::size_t q = 0; q < n; ++q) {
      if (s[i].test(q)) continue;
      if (auto j = f.index_of(s[i].with(q))) count[i] += count[*j];
    }
  }
  return count;
}

}  // namespace detail

inline StringEnumeration learning_strings(const StateFamily& f, std::size_t limit = SIZE_MAX) {
  StringEnumeration out;
  const auto n = f.domain().size();
  auto root = f.index_of(f.domain().empty_state());
  if (!root) return out;
  const auto count = detail::completion_counts(f);
  out.total = count[*root];
  Word prefix;
  auto dfs = [&](auto&& self, std::size_t idx) -> void {
    if (out.strings.size() >= limit) return;
    const State& k = f.state(idx);
    if (prefix.size() == n) {
      out.strings.push_back(prefix);
      return;
    }
    for (std::size_t q = 0; q < n && out.strings.size() < limit; ++q) {
      if (k.test(q)) continue;
      auto j = f.index_of(k.with(q));
      if (!j || count[*j] == 0) continue;
      prefix.push_back(q);
      self(self, *j);
      prefix.pop_back();
    }
  };
  dfs(dfs, *root);
  return out;
}

/// Every learning word, the empty word included, in depth-first order.
inline std::vector<Word> learning_words(const StateFamily& f, std::size_t limit = SIZE_MAX) {
  std::vector<Word> out;
  const auto n = f.domain().size();
  auto root = f.index_of(f.domain().empty_state());
  if (!root) return out;
  Word prefix;
  auto dfs = [&](auto&& self, const State& k) -> void {
    if (out.size() >= limit) return;
    out.push_back(prefix);
    for (std::size_t q = 0; q < n; ++q) {
      if (k.test(q)) continue;
      State next = k.with(q);
      if (!f.contains(next)) continue;
      prefix.push_back(q);
      self(self, next);
      prefix.pop_back();
    }
  };
  dfs(dfs, f.domain().empty_state());
  return out;
}

struct AxiomFailure {
  int condition = 0;  // 1, 2 or 3
  std::size_t k = 0;
  Word u;  // relevant prefix of the first string/word
  Word v;  // relevant prefix of the second
  std::optional<std::size_t> item;
};

struct AxiomCheck {
  bool holds = true;
  std::optional<AxiomFailure> failure;
};

/// Conditions characterizing the learning strings of a learning space:
/// (i) every item occurs; (ii) if u, v agree as sets up to k-1 and differ at
/// k, then u_1..u_k v_k is a prefix; (iii) if v_1..v_{k+1} minus u_1..u_k is
/// {q}, then u_1..u_k q is a prefix.
inline AxiomCheck check_string_axioms(const Domain& domain, const std::vector<Word>& strings) {
  const auto m = domain.size();
  detail::check_strings(strings, m);
  AxiomCheck out;
  auto failed = [&](AxiomFailure f) {
    out.holds = false;
    out.failure = std::move(f);
    return out;
  };
  // Any non-empty collection of permutations mentions every item; kept for
  // the record.
  State seen(m);
  for (const auto& s : strings) seen |= word_set(s, m);
  if (seen.count() != m) return failed({1, 0, {}, {}, std::nullopt});

  for (const auto& u : strings) {
    for (const auto& v : strings) {
      for (std::size_t k = 1; k < m; ++k) {
        if (prefix_set(u, m, k - 1) != prefix_set(v, m, k - 1) || u[k - 1] == v[k - 1]) continue;
        Word p(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(k));
        p.push_back(v[k - 1]);
        if (!detail::has_prefix(strings, p))
          return failed({2, k, Word(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(k)),
                         Word(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k)), std::nullopt});
      }
    }
  }
  for (const auto& v : strings) {
    for (const auto& u : strings) {
      for (std::size_t k = 0; k < m; ++k) {
        State diff = prefix_set(v, m, k + 1) - prefix_set(u, m, k);
        if (diff.count() != 1) continue;
        const auto q = diff.first();
        Word p(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(k));
        p.push_back(q);
        if (!detail::has_prefix(strings, p))
          return failed({3, k, Word(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(k)),
                         Word(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k + 1)), q});
      }
    }
  }
  return out;
}

/// Conditions characterizing the learning words of a learning space:
/// (i) every item occurs; (ii) prefix closure; (iii) if set(v) is not inside
/// set(w), some q of set(v) minus set(w) extends w to a word of the family.
inline AxiomCheck check_word_axioms(const Domain& domain, const std::vector<Word>& words) {
  const auto m = domain.size();
  for (const auto& w : words) {
    detail::check_word(w, m, ErrorCode::MalformedWord, ErrorCode::MalformedWord);
  }
  AxiomCheck out;
  auto failed = [&](AxiomFailure f) {
    out.holds = false;
    out.failure = std::move(f);
    return out;
  };
  std::vector<Word> sorted = words;
  std::sort(sorted.begin(), sorted.end());
  auto member = [&](const Word& w) { return std::binary_search(sorted.begin(), sorted.end(), w); };

  State seen(m);
  for (const auto& w : words) seen |= word_set(w, m);
  if (seen.count() != m) {
    auto missing = (State::full(m) - seen).first();
    return failed({1, 0, {}, {}, missing});
  }
  for (const auto& w : words) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      Word p(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
      if (!member(p)) return failed({2, k, w, p, std::nullopt});
    }
  }
  for (const auto& v : words) {
    const State sv = word_set(v, m);
    for (const auto& w : words) {
      const State sw = word_set(w, m);
      if (sv.is_subset_of(sw)) continue;
      bool ok = false;
      (sv - sw).for_each([&](std::size_t q) {
        if (ok) return;
        Word wq = w;
        wq.push_back(q);
        ok = member(wq);
      });
      if (!ok) return failed({3, 0, v, w, std::nullopt});
    }
  }
  return out;
}

/// The learning space spanned by all prefix sets of the strings.
inline KnowledgeStructure encode_space_from_strings(DomainPtr domain, const std::vector<Word>& strings) {
  const auto m = domain->size();
  detail::check_strings(strings, m);
  std::vector<State> gens;
  for (const auto& s : strings)
    for (std::size_t k = 1; k <= m; ++k) gens.push_back(prefix_set(s, m, k));
  return span(std::move(domain), gens);
}

/// A set of learning strings encoding the space. Each round takes the string
/// whose prefix sets include the most base elements not yet hit (ties: the
/// lexicographically smallest string); every base element being a prefix set
/// is exactly what makes the span equal the space.
inline std::vector<Word> greedy_string_cover(const KnowledgeStructure& space) {
  if (!is_learning_space(space)) fail(ErrorCode::NotLearningSpace, "greedy cover needs a learning space");
  const auto n = space.domain().size();
  const auto& s = space.states();
  std::vector<char> uncovered(s.size(), 0);
  std::size_t remaining = 0;
  for (const auto& b : base(space)) {
    uncovered[*space.index_of(b)] = 1;
    ++remaining;
  }
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> up(s.size());  // (item, index)
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t q = 0; q < n; ++q)
      if (!s[i].test(q))
        if (auto j = space.index_of(s[i].with(q))) up[i].emplace_back(q, *j);

  std::vector<Word> out;
  const std::size_t root = *space.index_of(space.empty_state());
  while (remaining > 0) {
    std::vector<std::size_t> best(s.size(), 0);
    for (std::size_t i = s.size(); i-- > 0;) {
      std::size_t b = 0;
      for (auto [q, j] : up[i]) b = std::max(b, best[j]);
      best[i] = b + static_cast<std::size_t>(uncovered[i]);
    }
    Word w;
    std::size_t cur = root;
    while (!up[cur].empty()) {
      const std::size_t target = best[cur] - static_cast<std::size_t>(uncovered[cur]);
      for (auto [q, j] : up[cur]) {
        if (best[j] == target) {
          w.push_back(q);
          cur = j;
          break;
        }
      }
    }
    for (std::size_t k = 0; k <= w.size(); ++k) {
      auto idx = *space.index_of(prefix_set(w, n, k));
      if (uncovered[idx]) {
        uncovered[idx] = 0;
        --remaining;
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

/// The learning space encoded by `strings` random permutations of Q.
inline KnowledgeStructure random_learning_space(DomainPtr domain, Rng& rng, std::size_t strings) {
  std::vector<Word> words;
  for (std::size_t i = 0; i < std::max<std::size_t>(strings, 1); ++i)
    words.push_back(random_permutation(domain->size(), rng));
  return encode_space_from_strings(std::move(domain), words);
}

}  // namespace kst
