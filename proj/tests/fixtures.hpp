#pragma once

#include <string>

#include "kst/family.hpp"
#include "kst/io.hpp"

namespace fx {

inline kst::KnowledgeStructure k1() { return kst::structure_from_letters(4, {"", "a", "d", "ab", "ad", "abc", "abd", "abcd"}); }
inline kst::KnowledgeStructure k2() {
  return kst::structure_from_letters(4, {"", "a", "b", "c", "ab", "ac", "bc", "abd", "abc", "acd", "abcd"});
}
inline kst::KnowledgeStructure k3() { return kst::structure_from_letters(4, {"", "a", "d", "ab", "cd", "abc", "bcd", "abcd"}); }
inline kst::KnowledgeStructure k4() { return kst::structure_from_letters(4, {"", "c", "d", "cd", "abc", "abd", "abcd"}); }
inline kst::KnowledgeStructure k5() { return kst::structure_from_letters(4, {"", "a", "c", "ab", "cd", "abc", "acd", "abcd"}); }

inline kst::KnowledgeStructure ten_items() {
  return kst::structure_from_letters(
      10, {"",       "c",       "i",       "g",        "ci",       "gi",       "hi",       "gh",       "cg",
           "cgh",    "chi",     "cgi",     "ghi",      "cghi",     "bghi",     "aghi",     "bcghi",    "acghi",
           "cghij",  "abghi",   "cfghij",  "bcghij",   "acghij",   "abcghi",   "abcfghi",  "abcghij",  "bcfghij",
           "acfghij", "abcfghij", "bcdfghij", "acdfghij", "abcdghij", "abcdfghij", "abcdefghij"});
}

inline kst::KnowledgeStructure example_h() {
  return kst::structure_from_letters(5, {"", "a", "bd", "abc", "abd", "bce", "abcd", "abce", "bcde", "abcde"});
}

/// Space with six learning strings.
inline kst::KnowledgeStructure strings_space() {
  return kst::structure_from_letters(4, {"", "a", "b", "ab", "bd", "abc", "abd", "bcd", "abcd"});
}

inline kst::KnowledgeStructure projection_space() {
  return kst::structure_from_letters(4, {"", "a", "b", "ab", "ad", "abd", "acd", "abcd"});
}

/// Structure whose {a}-child lacks the empty set.
inline kst::KnowledgeStructure child_counterexample() {
  return kst::structure_from_letters(4, {"", "b", "bc", "bd", "abc", "bcd", "abd", "abcd"});
}

inline kst::KnowledgeStructure hanging_space() {
  return kst::structure_from_letters(4, {"", "a", "b", "ab", "ac", "ad", "abc", "abd", "acd", "abcd"});
}

inline std::string data(const std::string& name) { return std::string(KST_DATA_DIR) + "/" + name; }

inline kst::State S(const kst::StateFamily& f, std::string_view letters) { return f.domain().parse_letters(letters); }

}  // namespace fx
