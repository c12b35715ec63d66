#include <gtest/gtest.h>

#include <map>

#include "fixtures.hpp"
#include "kst/probabilistic.hpp"
#include "oracles.hpp"

using namespace kst;
using fx::S;

TEST(Uniform, Examples) {
  auto u = uniform_distribution(fx::k1());
  for (double p : u.probs()) EXPECT_DOUBLE_EQ(p, 0.125);
  auto t = uniform_distribution(fx::ten_items());
  EXPECT_EQ(t.size(), 34u);
  EXPECT_DOUBLE_EQ(t.prob(0), 1.0 / 34);
  auto two = uniform_distribution(structure_from_letters(2, {"", "ab"}));
  EXPECT_EQ(two.probs(), (std::vector<double>{0.5, 0.5}));
}

TEST(Distribution, Validation) {
  auto k = fx::k1();
  EXPECT_THROW(StateDistribution(k, std::vector<double>(8, 0.2)), Error);
  EXPECT_THROW(StateDistribution(k, std::vector<double>(7, 1.0 / 7)), Error);
  std::vector<double> neg(8, 0.25);
  neg[0] = -0.75;
  EXPECT_THROW(StateDistribution(k, neg), Error);
}

TEST(Project, ExampleOnCD) {
  auto k = fx::projection_space();
  auto p = project_distribution(uniform_distribution(k), {"c", "d"});
  EXPECT_EQ(p.structure().format(), "{{}, {d}, {c,d}}");
  EXPECT_NEAR(p.prob(0), 0.5, 1e-12);
  EXPECT_NEAR(p.prob(1), 0.25, 1e-12);
  EXPECT_NEAR(p.prob(2), 0.25, 1e-12);
}

TEST(Project, PointMass) {
  auto k = fx::ten_items();
  std::vector<double> w(k.size(), 0.0);
  w[*k.index_of(S(k, "cghij"))] = 1.0;
  auto p = project_distribution(StateDistribution(k, w), {"a", "c", "j"});
  EXPECT_DOUBLE_EQ(p.prob(p.structure().domain().make_state({"c", "j"})), 1.0);
}

TEST(Project, DropOneItemMatchesBruteForce) {
  Rng rng(4);
  auto k = fx::ten_items();
  std::vector<double> w(k.size());
  for (auto& x : w) x = 0.1 + uniform01(rng);
  auto dist = StateDistribution::normalized(k, w);
  for (std::size_t drop = 0; drop < 10; ++drop) {
    State sub = k.full_state().without(drop);
    auto p = project_distribution(dist, sub);
    std::map<oracle::Mask, double> agg;
    for (std::size_t i = 0; i < k.size(); ++i) agg[oracle::mask(k.state(i) - State::from_indices(10, {drop}))] += dist.prob(i);
    ASSERT_EQ(agg.size(), p.size());
    for (std::size_t t = 0; t < p.size(); ++t) {
      State lifted = lift_from(p.structure().state(t), sub.indices(), 10);
      EXPECT_NEAR(p.prob(t), agg[oracle::mask(lifted)], 1e-12);
    }
  }
}

TEST(Extend, SplitsEachTraceEvenly) {
  auto k = fx::projection_space();
  auto sub = k.domain().make_state({"c", "d"});
  auto proj = project(k, sub).structure;
  std::vector<double> p(proj.size(), 0.0);
  p[*proj.index_of(proj.domain().make_state({"d"}))] = 1.0;
  auto ext = extend_distribution(k, sub, StateDistribution(proj, p));
  EXPECT_DOUBLE_EQ(ext.prob(S(k, "ad")), 0.5);
  EXPECT_DOUBLE_EQ(ext.prob(S(k, "abd")), 0.5);
  EXPECT_DOUBLE_EQ(ext.prob(S(k, "a")), 0.0);
}

TEST(Extend, UniformStaysUniformOnTheSquare) {
  auto k = power_set(make_domain({"a", "b"}));
  auto sub = k.domain().make_state({"a"});
  auto pp = project_distribution(uniform_distribution(k), sub);
  auto ext = extend_distribution(k, sub, pp);
  for (double v : ext.probs()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Extend, TraceMismatch) {
  auto k = fx::projection_space();
  auto sub = k.domain().make_state({"c", "d"});
  // a distribution on a structure that is not the projection
  auto wrong = uniform_distribution(power_set(make_domain({"c", "d"})));
  try {
    extend_distribution(k, sub, wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TraceMismatch);
  }
  auto other_domain = uniform_distribution(structure_from_letters(2, {"", "a", "ab"}));
  EXPECT_THROW(extend_distribution(k, sub, other_domain), Error);
}

TEST(Properties, ProjectAfterExtendIsIdentity) {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    auto k = oracle::structure(5, oracle::random_structure(5, rng));
    oracle::Mask sub = 0;
    while (sub == 0 || sub == 31) sub = static_cast<oracle::Mask>(uniform_index(rng, 32));
    auto s = oracle::state(5, sub);
    auto proj = project(k, s).structure;
    std::vector<double> w(proj.size());
    for (auto& x : w) x = uniform01(rng) + 1e-3;
    auto pp = StateDistribution::normalized(proj, w);
    auto ext = extend_distribution(k, s, pp);
    double sum = 0;
    for (double v : ext.probs()) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    auto back = project_distribution(ext, s);
    for (std::size_t i = 0; i < pp.size(); ++i) EXPECT_NEAR(back.prob(i), pp.prob(i), 1e-12);
  }
}

TEST(Properties, ExtendAfterProjectRestoresClassUniformSources) {
  Rng rng(12);
  auto k = fx::ten_items();
  auto s = k.domain().make_state({"a", "c", "f", "j"});
  auto pr = project(k, s);
  // class-uniform source: weight depends only on the trace
  std::vector<double> tw(pr.structure.size());
  for (auto& x : tw) x = uniform01(rng) + 0.01;
  std::vector<double> w(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) w[i] = tw[pr.trace_of[i]];
  auto src = StateDistribution::normalized(k, w);
  auto round = extend_distribution(k, s, project_distribution(src, s));
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(round.prob(i), src.prob(i), 1e-12);
  // a source that is not class-uniform does not come back
  std::vector<double> w2(k.size());
  for (auto& x : w2) x = uniform01(rng) + 0.01;
  auto src2 = StateDistribution::normalized(k, w2);
  auto round2 = extend_distribution(k, s, project_distribution(src2, s));
  double diff = 0;
  for (std::size_t i = 0; i < k.size(); ++i) diff += std::abs(round2.prob(i) - src2.prob(i));
  EXPECT_GT(diff, 1e-6);
}

TEST(ResponseParams, Validation) {
  EXPECT_THROW(ResponseParams::uniform(3, 1.5), Error);
  EXPECT_THROW(ResponseParams::uniform(3, 0.1, -0.1), Error);
  EXPECT_NO_THROW(ResponseParams::uniform(3, 0.1, 0.2));
}
