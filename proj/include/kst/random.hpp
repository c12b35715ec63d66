#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "kst/family.hpp"

namespace kst {

/// All randomness flows through this engine. The helpers below avoid the
/// standard distributions so that sequences are identical across standard
/// library implementations.
using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection; n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Fisher-Yates.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  shuffle(p, rng);
  return p;
}

/// Any family containing the empty set and Q; other subsets kept with
/// probability `density`. n <= 20.
inline KnowledgeStructure random_structure(DomainPtr domain, Rng& rng, double density = 0.5) {
  const auto n = domain->size();
  std::vector<State> states{State(n), State::full(n)};
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    if (!bernoulli(rng, density)) continue;
    State s(n);
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) s.set(i);
    states.push_back(std::move(s));
  }
  return KnowledgeStructure(std::move(domain), std::move(states));
}

}  // namespace kst
