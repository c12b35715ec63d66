#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "kst/family.hpp"
#include "kst/random.hpp"

using namespace kst;

TEST(State, BasicOps) {
  State a = State::from_indices(5, {0, 2});
  State b = State::from_indices(5, {2, 3});
  EXPECT_EQ((a | b).indices(), (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ((a & b).indices(), (std::vector<std::size_t>{2}));
  EXPECT_EQ((a - b).indices(), (std::vector<std::size_t>{0}));
  EXPECT_EQ((a ^ b).count(), 2u);
  EXPECT_TRUE(State::from_indices(5, {2}).is_proper_subset_of(a));
  EXPECT_FALSE(a.is_proper_subset_of(a));
  EXPECT_EQ(a.complement().indices(), (std::vector<std::size_t>{1, 3, 4}));
  EXPECT_EQ(State::full(5).count(), 5u);
}

TEST(State, WideStatesSpillOverWords) {
  State s(130);
  s.set(0);
  s.set(64);
  s.set(129);
  EXPECT_EQ(s.count(), 3u);
  EXPECT_EQ(s.indices(), (std::vector<std::size_t>{0, 64, 129}));
  EXPECT_EQ(State::full(130).count(), 130u);
  EXPECT_EQ(State::full(130).complement().count(), 0u);
}

TEST(State, WidthMismatchThrows) {
  State a(3), b(4);
  try {
    a |= b;
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WidthMismatch);
  }
}

TEST(State, CanonicalOrderIsSizeThenLexicographic) {
  auto d = Domain::letters(3);
  std::vector<State> v{d.parse_letters("bc"), d.parse_letters("a"), d.parse_letters("ac"), d.parse_letters(""),
                       d.parse_letters("ab"), d.parse_letters("abc"), d.parse_letters("c")};
  std::sort(v.begin(), v.end(), CanonicalLess{});
  std::vector<std::string> got;
  for (auto& s : v) got.push_back(d.format(s));
  EXPECT_EQ(got, (std::vector<std::string>{"{}", "{a}", "{c}", "{a,b}", "{a,c}", "{b,c}", "{a,b,c}"}));
}

TEST(Domain, RejectsDuplicatesAndUnknownItems) {
  EXPECT_THROW(Domain({"x", "y", "x"}), Error);
  auto d = Domain::letters(3);
  try {
    d.make_state({"z"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownItem);
  }
}

TEST(Family, DeduplicatesAndOrders) {
  auto d = make_domain({"a", "b"});
  StateFamily f(d, {d->parse_letters("ab"), d->parse_letters(""), d->parse_letters("a"), d->parse_letters("a")});
  EXPECT_TRUE(f.had_duplicates());
  EXPECT_EQ(f.size(), 3u);
  EXPECT_EQ(f.format(), "{{}, {a}, {a,b}}");
}

TEST(Family, StructureNeedsEmptyAndFull) {
  try {
    structure_from_letters(2, {"", "a"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingEmptyOrFull);
  }
  try {
    KnowledgeStructure(make_domain({}), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyDomain);
  }
}

TEST(Random, UniformIndexStaysInRangeAndCoversValues) {
  Rng rng(7);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) ++hits[uniform_index(rng, 5)];
  for (int h : hits) EXPECT_NEAR(h, 1000, 150);
  for (int i = 0; i < 1000; ++i) {
    double u = uniform01(rng);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Random, SequencesAreReproducible) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(uniform_index(a, 1000), uniform_index(b, 1000));
}
