#pragma once

#include <cstddef>
#include <vector>

#include "kst/state.hpp"

namespace kst::detail {

/// Enumerates every fixed point of an interior operator on the subsets of
/// {0..n-1}. `interior(X)` must return the largest member contained in X.
/// Members are the complements of the closed sets of the dual closure
/// operator, which Ganter's NextClosure walks in lectic order.
template <typename Interior>
std::vector<State> enumerate_interior_fixed_points(std::size_t n, Interior&& interior) {
  const State full = State::full(n);
  auto closure = [&](const State& y) { return full - interior(full - y); };

  std::vector<State> out;
  State a = closure(State(n));
  out.push_back(full - a);
  while (a != full) {
    bool advanced = false;
    for (std::size_t ii = n; ii-- > 0;) {
      if (a.test(ii)) continue;
      State prefix(n);
      for (std::size_t j = 0; j < ii; ++j)
        if (a.test(j)) prefix.set(j);
      State b = closure(prefix.with(ii));
      State added = b - a;
      bool ok = true;
      for (std::size_t j = 0; j < ii; ++j) {
        if (added.test(j)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        a = std::move(b);
        out.push_back(full - a);
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return out;
}

}  // namespace kst::detail
