#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "kst/builder.hpp"
#include "kst/strings.hpp"
#include "oracles.hpp"

using namespace kst;
using fx::S;

namespace {

std::vector<std::string> fmt(const Domain& d, const std::vector<Word>& ws) {
  std::vector<std::string> out;
  for (const auto& w : ws) out.push_back(format_word(d, w));
  return out;
}

std::vector<Word> words(const Domain& d, std::initializer_list<const char*> xs) {
  std::vector<Word> out;
  for (auto x : xs) out.push_back(parse_word(d, std::string_view(x)));
  return out;
}

}  // namespace

TEST(Strings, SixLearningStrings) {
  auto k = fx::strings_space();
  auto e = learning_strings(k);
  EXPECT_EQ(fmt(k.domain(), e.strings),
            (std::vector<std::string>{"abcd", "abdc", "bacd", "badc", "bdac", "bdca"}));
  EXPECT_EQ(e.total, 6);
}

TEST(Strings, Trivia) {
  auto none = structure_from_letters(2, {"", "ab"});
  EXPECT_EQ(learning_strings(none).total, 0);
  EXPECT_TRUE(learning_strings(none).strings.empty());
  auto cube = power_set(make_domain({"a", "b", "c"}));
  EXPECT_EQ(learning_strings(cube).total, 6);
}

TEST(Strings, LimitTruncatesButCountIsExact) {
  auto big = power_set(make_domain({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"}));
  auto e = learning_strings(big, 5);
  EXPECT_EQ(e.strings.size(), 5u);
  EXPECT_EQ(e.total, BigCount("479001600"));
}

TEST(Words, LearningWordChecks) {
  auto k = fx::strings_space();
  EXPECT_TRUE(is_learning_word(k, parse_word(k.domain(), "bda")));
  EXPECT_TRUE(is_learning_word(k, {}));
  EXPECT_FALSE(is_learning_word(k, parse_word(k.domain(), "d")));
  try {
    is_learning_word(k, {0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RepeatedItem);
  }
  try {
    is_learning_word(k, {7});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownItem);
  }
}

TEST(StringAxioms, CounterexampleFailsConditionTwo) {
  auto d = Domain::letters(4);
  auto r = check_string_axioms(d, words(d, {"abdc", "acdb"}));
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(r.failure->condition, 2);
  EXPECT_EQ(r.failure->k, 2u);
  EXPECT_EQ(format_word(d, r.failure->u), "ab");
  EXPECT_EQ(format_word(d, r.failure->v), "ac");
}

TEST(StringAxioms, CounterexampleFailsConditionThree) {
  auto d = Domain::letters(4);
  auto r = check_string_axioms(d, words(d, {"abcd", "badc"}));
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(r.failure->condition, 3);
  EXPECT_EQ(r.failure->k, 2u);
  EXPECT_EQ(format_word(d, r.failure->u), "ba");
  EXPECT_EQ(format_word(d, r.failure->v), "abc");
  EXPECT_EQ(d.item(*r.failure->item), "c");
}

TEST(StringAxioms, MalformedStrings) {
  auto d = Domain::letters(3);
  for (auto bad : {std::vector<Word>{{0, 1}}, std::vector<Word>{{0, 0, 1}}, std::vector<Word>{}}) {
    try {
      check_string_axioms(d, bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedString);
    }
  }
}

TEST(StringAxioms, LearningStringsOfK1Pass) {
  auto k = fx::k1();
  EXPECT_TRUE(check_string_axioms(k.domain(), learning_strings(k).strings).holds);
}

TEST(WordAxioms, Examples) {
  auto k = fx::strings_space();
  EXPECT_TRUE(check_word_axioms(k.domain(), learning_words(k)).holds);
  auto r = check_word_axioms(k.domain(), {Word{}});
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(r.failure->condition, 1);
  auto chain = structure_from_letters(3, {"", "a", "ab", "abc"});
  EXPECT_TRUE(check_word_axioms(chain.domain(), learning_words(chain)).holds);
  // dropping a prefix breaks (ii)
  auto ws = learning_words(chain);
  ws.erase(ws.begin() + 1);
  EXPECT_EQ(check_word_axioms(chain.domain(), ws).failure->condition, 2);
}

TEST(Encoding, KnownEncodingsRegenerateTheSpace) {
  auto k = fx::strings_space();
  const auto& d = k.domain();
  EXPECT_EQ(encode_space_from_strings(k.domain_ptr(), words(d, {"abdc", "bacd", "bdca"})), k);
  EXPECT_EQ(encode_space_from_strings(k.domain_ptr(), words(d, {"abcd", "bdca"})), k);
}

TEST(Encoding, NoSingleStringEncodesTheSpace) {
  auto k = fx::strings_space();
  for (const auto& s : learning_strings(k).strings)
    EXPECT_NE(encode_space_from_strings(k.domain_ptr(), {s}), k);
}

TEST(Encoding, SingleStringGivesAChain) {
  auto d = make_domain({"a", "b", "c", "d", "e"});
  auto k = encode_space_from_strings(d, {parse_word(*d, "cebad")});
  EXPECT_EQ(k.size(), 6u);
  EXPECT_TRUE(is_learning_space(k));
}

TEST(Cover, Examples) {
  auto k = fx::strings_space();
  auto c = greedy_string_cover(k);
  EXPECT_LE(c.size(), 3u);
  EXPECT_GE(c.size(), 2u);
  EXPECT_EQ(encode_space_from_strings(k.domain_ptr(), c), k);

  auto chain = structure_from_letters(3, {"", "b", "bc", "abc"});
  EXPECT_EQ(greedy_string_cover(chain).size(), 1u);
  auto square = power_set(make_domain({"a", "b"}));
  EXPECT_EQ(greedy_string_cover(square).size(), 2u);
  try {
    greedy_string_cover(fx::k3());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotLearningSpace);
  }
}

TEST(Cover, SquareNeedsTwoStringsByBruteForce) {
  auto square = power_set(make_domain({"a", "b"}));
  auto all = learning_strings(square).strings;
  std::size_t best = 99;
  for (unsigned pick = 1; pick < (1u << all.size()); ++pick) {
    std::vector<Word> sel;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (pick >> i & 1U) sel.push_back(all[i]);
    if (encode_space_from_strings(square.domain_ptr(), sel) == square) best = std::min(best, sel.size());
  }
  EXPECT_EQ(best, 2u);
}

TEST(Properties, StringTheoremBothDirections) {
  // Every learning space on up to 4 items, plus random ones on 5.
  auto check = [](const KnowledgeStructure& k) {
    const auto n = static_cast<int>(k.domain().size());
    auto ls = learning_strings(k);
    auto brute = oracle::learning_strings(oracle::masks(k), n);
    ASSERT_EQ(ls.strings.size(), brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i)
      for (int j = 0; j < n; ++j) ASSERT_EQ(ls.strings[i][static_cast<std::size_t>(j)], static_cast<std::size_t>(brute[i][static_cast<std::size_t>(j)]));
    ASSERT_TRUE(check_string_axioms(k.domain(), ls.strings).holds);
    ASSERT_EQ(encode_space_from_strings(k.domain_ptr(), ls.strings), k);
    ASSERT_TRUE(check_word_axioms(k.domain(), learning_words(k)).holds);
    auto cover = greedy_string_cover(k);
    ASSERT_EQ(encode_space_from_strings(k.domain_ptr(), cover), k);
    ASSERT_EQ(gradations(k).total, ls.total);
  };
  std::size_t spaces = 0;
  for (int n = 1; n <= 4; ++n)
    oracle::for_each_structure(n, [&](const oracle::Fam& m) {
      if (!oracle::learning_space(m, n)) return;
      check(oracle::structure(n, m));
      ++spaces;
    });
  EXPECT_GT(spaces, 0u);
  Rng rng(13);
  for (int t = 0; t < 100; ++t) check(oracle::structure(5, oracle::random_learning_space(5, rng, 3)));
}

TEST(Properties, SubsetsOfStringsEncodeSubspaces) {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    auto k = oracle::structure(5, oracle::random_learning_space(5, rng, 4));
    auto all = learning_strings(k).strings;
    std::vector<Word> pick;
    for (const auto& s : all)
      if (bernoulli(rng, 0.3)) pick.push_back(s);
    if (pick.empty()) pick.push_back(all.front());
    auto enc = encode_space_from_strings(k.domain_ptr(), pick);
    for (const auto& s : enc) EXPECT_TRUE(k.contains(s));
    EXPECT_TRUE(is_learning_space(enc));
  }
}

TEST(Properties, NonLearningStringSetsAreDetected) {
  // Strings that are all learning strings of a space satisfy the axioms only
  // when they are all of them.
  auto k = fx::strings_space();
  auto all = learning_strings(k).strings;
  auto some = all;
  some.erase(some.begin());
  EXPECT_FALSE(check_string_axioms(k.domain(), some).holds);
}
