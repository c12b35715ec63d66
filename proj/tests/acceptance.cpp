// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
// failure. Runs without a test framework.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "kst/kst.hpp"
#include "oracles.hpp"

using namespace kst;
using fx::S;

namespace {

/// Collects the first few mismatches of a criterion.
struct Check {
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok && problems.size() < 5) problems.push_back(what);
  }
  template <typename A, typename B>
  void equal(const A& a, const B& b, const std::string& what) {
    expect(a == b, what);
  }
};

int failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.problems.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    std::ostringstream s;
    s << "took " << secs << " s, limit " << limit_s << " s";
    c.problems.push_back(s.str());
  }
  const bool ok = c.problems.empty();
  failures += !ok;
  std::printf("%s  %-28s %8.3f s", ok ? "PASS" : "FAIL", name.c_str(), secs);
  if (!ok) {
    std::printf("  --");
    for (const auto& p : c.problems) std::printf(" [%s]", p.c_str());
  }
  std::printf("\n");
  std::fflush(stdout);
}

std::vector<State> letters(const StateFamily& f, std::initializer_list<const char*> ls) {
  std::vector<State> out;
  for (auto l : ls) out.push_back(S(f, l));
  std::sort(out.begin(), out.end(), CanonicalLess{});
  return out;
}

void five_examples(Check& c) {
  auto k1 = fx::k1(), k2 = fx::k2(), k3 = fx::k3(), k4 = fx::k4(), k5 = fx::k5();
  c.expect(is_learning_space(k1), "K1 learning space");
  c.expect(is_learning_space(k2), "K2 learning space");
  auto a3 = check_l1_l2(k3);
  c.expect(a3.l1.holds && !a3.l2.holds, "K3 satisfies L1 only");
  if (!a3.l2.holds) {
    c.equal(a3.l2.witness->k, S(k3, ""), "K3 witness K");
    c.equal(a3.l2.witness->l, S(k3, "a"), "K3 witness L");
    c.equal(k3.domain().item(a3.l2.witness->item), std::string("d"), "K3 witness q");
  }
  auto a4 = check_l1_l2(k4);
  c.expect(!a4.l1.holds && a4.l2.holds, "K4 fails L1 only");
  c.expect(!is_discriminative(k4), "K4 not discriminative");
  auto a5 = check_l1_l2(k5);
  c.expect(!a5.l1.holds && !a5.l2.holds, "K5 fails both");
}

void ten_items(Check& c) {
  auto k = fx::ten_items();
  c.equal(k.size(), 34u, "34 states");
  std::map<std::string, std::vector<State>> table{
      {"a", letters(k, {"aghi"})},
      {"b", letters(k, {"bghi"})},
      {"c", letters(k, {"c"})},
      {"d", letters(k, {"bcdfghij", "acdfghij", "abcdghij"})},
      {"e", letters(k, {"abcdefghij"})},
      {"f", letters(k, {"cfghij", "abcfghi"})},
      {"g", letters(k, {"g"})},
      {"h", letters(k, {"hi", "gh"})},
      {"i", letters(k, {"i"})},
      {"j", letters(k, {"cghij"})},
  };
  std::vector<State> all;
  for (const auto& [item, atoms] : table) {
    c.equal(atoms_at(k, item), atoms, "atoms at " + item);
    all.insert(all.end(), atoms.begin(), atoms.end());
  }
  std::sort(all.begin(), all.end(), CanonicalLess{});
  all.erase(std::unique(all.begin(), all.end()), all.end());
  c.equal(base(k), all, "base = atoms");
  auto fr = fringes(k, S(k, "cghij"));
  c.equal(fr.inner, S(k, "j"), "inner fringe");
  c.equal(fr.outer, S(k, "abf"), "outer fringe");
}

void example_h(Check& c) {
  auto h = fx::example_h();
  auto sigma = surmise_function(h);
  const std::vector<std::vector<State>> table{letters(h, {"a"}), letters(h, {"bd", "abc", "bce"}),
                                              letters(h, {"abc", "bce"}), letters(h, {"bd"}), letters(h, {"bce"})};
  for (std::size_t q = 0; q < 5; ++q) c.equal(sigma.clauses_for(q), table[q], "clauses for " + h.domain().item(q));
  oracle::Fam expect;
  for (oracle::Mask m = 0; m < 32; ++m) {
    bool ok = true;
    for (int q = 0; q < 5; ++q) {
      if (!(m >> q & 1U)) continue;
      bool found = false;
      for (const auto& cl : sigma.clauses_for(static_cast<std::size_t>(q)))
        found = found || (oracle::mask(cl) & m) == oracle::mask(cl);
      ok = ok && found;
    }
    if (ok) expect.push_back(m);
  }
  c.equal(oracle::masks(h), expect, "brute-force attribution space equals H");
  c.equal(space_from_attribution(sigma), h, "space_from_attribution regenerates H");
}

void equivalences(Check& c) {
  std::size_t discrepancies = 0, seen = 0;
  auto one = [&](int n, const oracle::Fam& f) {
    ++seen;
    auto k = oracle::structure(n, f);
    auto ax = check_l1_l2(k);
    const bool ls = ax.l1.holds && ax.l2.holds;
    const bool uc = is_union_closed(k);
    const bool anti = uc && is_accessible(k);
    const bool wg_space = uc && is_well_graded(k);
    const bool abc = is_accessible(k) && satisfies_pairwise_extension(k);
    // the library against itself, then against the brute-force oracles
    bool agree = ls == anti && ls == wg_space && ls == abc && ls == is_learning_space(k);
    agree = agree && ls == oracle::learning_space(f, n) && anti == oracle::antimatroid(f, n) &&
            abc == oracle::conditions_abc(f, n);
    if (uc) {
      const bool nh = hanging_states(k).hanging.empty();
      agree = agree && ls == nh && nh == oracle::no_hanging(f, n) && ls == ls_check_via_atoms(k).holds;
    }
    if (!agree) {
      ++discrepancies;
      c.expect(false, "disagreement on " + k.format());
    }
  };
  for (int n = 1; n <= 4; ++n) oracle::for_each_structure(n, [&](const oracle::Fam& f) { one(n, f); });
  Rng rng(2024);
  for (int t = 0; t < 600; ++t) {
    oracle::Fam f;
    switch (t % 3) {
      case 0: f = oracle::random_structure(5, rng); break;
      case 1: f = oracle::random_learning_space(5, rng, 1 + static_cast<int>(uniform_index(rng, 4))); break;
      default: {  // a learning space with one middle state dropped: near misses
        f = oracle::random_learning_space(5, rng, 2 + static_cast<int>(uniform_index(rng, 3)));
        if (f.size() > 2) f.erase(f.begin() + 1 + static_cast<std::ptrdiff_t>(uniform_index(rng, f.size() - 2)));
      }
    }
    one(5, f);
  }
  c.equal(discrepancies, 0u, "zero discrepancies");
  c.expect(seen > 16000, "coverage");
}

void strings(Check& c) {
  auto k = fx::strings_space();
  const auto& d = k.domain();
  auto words = [&](std::initializer_list<const char*> ls) {
    std::vector<Word> out;
    for (auto l : ls) out.push_back(parse_word(d, l));
    return out;
  };
  auto en = learning_strings(k);
  c.equal(en.total, BigCount(6), "6 learning strings");
  c.equal(en.strings.size(), 6u, "6 strings listed");
  auto d4 = Domain::letters(4);
  auto ii = check_string_axioms(d4, words({"abdc", "acdb"}));
  c.expect(!ii.holds && ii.failure->condition == 2, "first pair fails (ii)");
  auto iii = check_string_axioms(d4, words({"abcd", "badc"}));
  c.expect(!iii.holds && iii.failure->condition == 3, "second pair fails (iii)");
  c.equal(encode_space_from_strings(k.domain_ptr(), words({"abdc", "bacd", "bdca"})), k, "three-string encoding");
  c.equal(encode_space_from_strings(k.domain_ptr(), words({"abcd", "bdca"})), k, "two-string encoding");
  for (const auto& s : en.strings)
    c.expect(encode_space_from_strings(k.domain_ptr(), {s}) != k, "single string " + format_word(d, s));
}

void projection(Check& c) {
  auto k = fx::projection_space();
  c.equal(project(k, {"c", "d"}).structure.format(), std::string("{{}, {d}, {c,d}}"), "projection on {c,d}");
  auto ch = children(k, k.domain().make_state({"c", "d"}));
  c.equal(ch.size(), 3u, "three children");
  if (ch.size() == 3) {
    c.equal(ch[0].child.format(), std::string("{{}, {a}, {b}, {a,b}}"), "child of {}");
    c.equal(ch[1].child.format(), std::string("{{}, {b}}"), "child of {d}");
    c.equal(ch[2].child.format(), std::string("{{}, {b}}"), "child of {c,d}");
  }
  auto cx = fx::child_counterexample();
  auto cch = children(cx, cx.domain().make_state({"a"}));
  c.expect(cch.size() == 2 && cch[1].child.format() == "{{c}, {d}, {c,d}}", "counterexample child");
  c.expect(cch.size() == 2 && !cch[1].child.contains(cch[1].child.domain().empty_state()), "child lacks empty set");
  Rng rng(808);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 5));  // 2..6
    auto m = oracle::random_learning_space(n, rng, 1 + static_cast<int>(uniform_index(rng, 4)));
    auto ls = oracle::structure(n, m);
    oracle::Mask sub = 0;
    while (sub == 0 || sub == oracle::full(n)) sub = static_cast<oracle::Mask>(uniform_index(rng, 1u << n));
    auto s = oracle::state(n, sub);
    c.expect(is_learning_space(project(ls, s).structure), "projection of " + ls.format());
    for (const auto& child : children(ls, s))
      c.expect(is_union_stable(child.child) && is_well_graded(child.child), "child of " + ls.format());
  }
}

std::vector<State> latent_draws(const KnowledgeStructure& k, std::uint64_t seed, std::size_t count) {
  Rng pick(seed);
  std::vector<State> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(k.state(uniform_index(pick, k.size())));
  return out;
}

void assessment(Check& c) {
  auto k = fx::ten_items();
  const StopRule stop{0.95, 200};
  const auto zeta = ZetaTable::uniform(10, 2.0);
  auto latents = latent_draws(k, 7, 200);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < latents.size(); ++i) {
    Assessment run(uniform_distribution(k), zeta, stop, i);
    Rng answers(responder_seed(i));
    auto who = Responder::straight(latents[i]);
    while (!run.finished()) {
      auto q = run.next_item();
      run.answer(simulate_response(who, q, answers));
      const auto& p = run.belief().dist.probs();
      double sum = 0;
      bool positive = true;
      for (double v : p) {
        sum += v;
        positive = positive && v > 0;
      }
      c.expect(positive, "positivity");
      c.expect(std::abs(sum - 1) <= kSumTolerance, "normalization");
    }
    hits += run.result().final_state == latents[i];
  }
  c.expect(hits >= 198, "recovery " + std::to_string(hits) + "/200 below 99%");

  Rng rng(99);
  double worst = 0;
  for (int t = 0; t < 200; ++t) {
    auto b = make_belief(uniform_distribution(k), zeta, 1);
    for (int s = 0; s < 5; ++s) apply_update(b, uniform_index(rng, 10), static_cast<int>(uniform_index(rng, 2)));
    std::size_t q1 = uniform_index(rng, 10), q2 = uniform_index(rng, 10);
    int r1 = static_cast<int>(uniform_index(rng, 2)), r2 = static_cast<int>(uniform_index(rng, 2));
    auto ab = update_distribution(update_distribution(b, q1, r1), q2, r2);
    auto ba = update_distribution(update_distribution(b, q2, r2), q1, r1);
    for (std::size_t i = 0; i < k.size(); ++i) worst = std::max(worst, std::abs(ab.dist.prob(i) - ba.dist.prob(i)));
  }
  c.expect(worst <= 1e-12, "commutativity gap " + std::to_string(worst));
}

void parallel(Check& c) {
  auto k = fx::ten_items();
  const auto zeta = ZetaTable::uniform(10);
  auto latents = latent_draws(k, 13, 200);
  for (std::size_t i = 0; i < 50; ++i) {
    auto who = Responder::careless(latents[i], ResponseParams::uniform(10, 0.1));
    auto base = run_assessment(k, who, {}, zeta, i);
    auto par = parallel_assessment(k, {k.full_state()}, who, {}, zeta, i);
    c.expect(base.transcript == par.transcript && base.final_state == par.final_state,
             "N=1 differs at seed " + std::to_string(i));
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < latents.size(); ++i) {
    auto par = parallel_assessment(k, {S(k, "abcde"), S(k, "fghij")}, Responder::straight(latents[i]), {}, zeta, i);
    hits += par.final_state == latents[i];
  }
  c.expect(hits >= 180, "two-block recovery " + std::to_string(hits) + "/200 below 90%");
}

void builder(Check& c) {
  auto h = fx::hanging_space();
  auto rep = hanging_states(h);
  c.expect(rep.hanging.empty(), "no hanging states");
  c.equal(rep.almost_hanging, letters(h, {"ac", "ad"}), "almost hanging {a,c},{a,d}");

  std::vector<std::uint16_t> spaces;
  std::vector<oracle::Fam> knowledge;
  for (int n = 1; n <= 4; ++n) {
    spaces.clear();
    knowledge.clear();
    oracle::for_each_structure(n, [&](const oracle::Fam& f) {
      if (!oracle::union_closed(f)) return;
      knowledge.push_back(f);
      std::uint16_t b = 0;
      for (auto m : f) b |= static_cast<std::uint16_t>(1u << m);
      if (!oracle::learning_space(f, n)) return;
      spaces.push_back(b);
      auto k = oracle::structure(n, f);
      for (oracle::Mask a = 1; a < oracle::full(n); ++a)
        for (int q = 0; q < n; ++q) {
          if (a >> q & 1) continue;
          oracle::Fam rest;
          for (auto m : f)
            if ((m & a) || !(m >> q & 1)) rest.push_back(m);
          c.expect(adapted_guard(k, oracle::state(n, a), static_cast<std::size_t>(q)).allowed ==
                       oracle::learning_space(rest, n),
                   "guard on " + k.format());
        }
    });
    for (const auto& f : knowledge) {
      std::uint16_t fb = 0, un = 0;
      for (auto m : f) fb |= static_cast<std::uint16_t>(1u << m);
      for (auto l : spaces)
        if ((l & fb) == l) un |= l;
      auto got = largest_learning_subspace(oracle::family(n, f));
      std::uint16_t gb = 0;
      if (got)
        for (const auto& s : *got) gb |= static_cast<std::uint16_t>(1u << oracle::mask(s));
      c.equal(gb, un, "largest learning subspace of " + oracle::structure(n, f).format());
    }
  }
  c.expect(!largest_learning_subspace(fx::k4()), "K4 gives Empty");
  c.expect(!largest_learning_subspace(fx::example_h()), "Example H gives Empty");

  auto k = fx::ten_items();
  auto o = QueryOracle::truthful(k);
  auto st = adjusted_query_run(k.domain_ptr(), o, 9);
  c.expect(!st.exited && st.current == k, "adjusted run recovers the ten-item space");
}

void extra_problem(Check& c) {
  auto k = fx::ten_items();
  auto straight = extra_problem_metrics(k, 5000, ResponseParams::uniform(10), 1);
  c.expect(straight.phi >= 0.99, "straight phi " + std::to_string(straight.phi));
  auto careless = extra_problem_metrics(k, 5000, ResponseParams::uniform(10, 0.1), 1);
  c.expect(careless.phi < straight.phi, "careless phi " + std::to_string(careless.phi) + " not below straight");
}

}  // namespace

int main() {
  criterion("five-example-classification", 1, five_examples);
  criterion("ten-item-fixture", 1, ten_items);
  criterion("example-h-surmise", 0, example_h);
  criterion("theorem-equivalence", 60, equivalences);
  criterion("strings", 0, strings);
  criterion("projection", 0, projection);
  criterion("assessment-convergence", 30, assessment);
  criterion("parallel-variant", 0, parallel);
  criterion("builder", 120, builder);
  criterion("extra-problem", 0, extra_problem);
  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
