#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kst/assessment.hpp"
#include "kst/family.hpp"
#include "kst/probabilistic.hpp"
#include "kst/structures.hpp"

namespace kst {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// A space file: the structure plus optional distribution and metadata.
/// Fields this code does not know about are carried along untouched.
struct SpaceDocument {
  KnowledgeStructure structure;
  std::optional<std::vector<double>> distribution;  // canonical state order
  std::optional<std::string> name;
  std::optional<std::string> description;
  std::map<std::string, std::string> display_text;
  json extra = json::object();

  std::string display(std::size_t item) const {
    const auto& id = structure.domain().item(item);
    auto it = display_text.find(id);
    return it == display_text.end() ? id : it->second;
  }
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] inline void parse_fail(std::string_view text, std::size_t offset, const std::string& what) {
  auto [l, c] = line_col(text, offset);
  fail(ErrorCode::ParseError, "line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + what);
}

/// Offset of the first `"token"` after `key`, for error positions on
/// already-parsed documents; falls back to the key itself.
inline std::size_t locate(std::string_view text, const std::string& key, const std::string& token) {
  auto k = text.find("\"" + key + "\"");
  if (k == std::string_view::npos) return 0;
  auto t = text.find("\"" + token + "\"", k + key.size() + 2);
  return t == std::string_view::npos ? k : t;
}

inline const json& require(std::string_view text, const json& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) parse_fail(text, 0, "missing field '" + key + "'");
  return *it;
}

inline std::vector<std::string> string_list(std::string_view text, const json& j, const std::string& key) {
  if (!j.is_array()) parse_fail(text, locate(text, key, ""), "'" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) parse_fail(text, locate(text, key, ""), "'" + key + "' must hold strings only");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace detail

inline SpaceDocument parse_space(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    detail::parse_fail(text, e.byte > 0 ? e.byte - 1 : 0, "malformed JSON");
  }
  if (!doc.is_object()) detail::parse_fail(text, 0, "top level must be an object");

  const auto& version = detail::require(text, doc, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion)
    detail::parse_fail(text, detail::locate(text, "format_version", ""), "unsupported format_version");

  auto items = detail::string_list(text, detail::require(text, doc, "domain"), "domain");
  DomainPtr domain;
  try {
    domain = make_domain(items);
  } catch (const Error& e) {
    detail::parse_fail(text, detail::locate(text, "domain", ""), e.what());
  }

  const auto& states = detail::require(text, doc, "states");
  if (!states.is_array()) detail::parse_fail(text, detail::locate(text, "states", ""), "'states' must be an array");
  std::vector<State> bits;
  for (const auto& s : states) {
    auto names = detail::string_list(text, s, "states");
    State b(domain->size());
    for (const auto& n : names) {
      auto i = domain->find(n);
      if (!i) detail::parse_fail(text, detail::locate(text, "states", n), "unknown item '" + n + "'");
      b.set(*i);
    }
    bits.push_back(std::move(b));
  }

  SpaceDocument out;
  out.structure = KnowledgeStructure(domain, bits);

  if (auto it = doc.find("distribution"); it != doc.end()) {
    if (!it->is_array() || it->size() != bits.size())
      detail::parse_fail(text, detail::locate(text, "distribution", ""),
                         "'distribution' must list one number per state");
    std::vector<double> probs(out.structure.size(), 0.0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (!(*it)[i].is_number()) detail::parse_fail(text, detail::locate(text, "distribution", ""), "not a number");
      probs[*out.structure.index_of(bits[i])] += (*it)[i].get<double>();
    }
    StateDistribution check(out.structure, probs);  // validates
    out.distribution = std::move(probs);
  }
  if (auto it = doc.find("name"); it != doc.end() && it->is_string()) out.name = it->get<std::string>();
  if (auto it = doc.find("description"); it != doc.end() && it->is_string())
    out.description = it->get<std::string>();
  if (auto it = doc.find("display_text"); it != doc.end()) {
    if (!it->is_object()) detail::parse_fail(text, detail::locate(text, "display_text", ""), "must be an object");
    for (const auto& [k, v] : it->items()) {
      if (!domain->find(k)) detail::parse_fail(text, detail::locate(text, "display_text", k), "unknown item '" + k + "'");
      if (!v.is_string()) detail::parse_fail(text, detail::locate(text, "display_text", k), "must be a string");
      out.display_text[k] = v.get<std::string>();
    }
  }
  for (const auto& [k, v] : doc.items()) {
    if (k == "format_version" || k == "domain" || k == "states" || k == "distribution" || k == "name" ||
        k == "description" || k == "display_text")
      continue;
    out.extra[k] = v;
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::BadRequest, "cannot write " + path.string());
  out << text;
}

inline SpaceDocument load_space(const std::filesystem::path& path) {
  try {
    return parse_space(read_file(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseError) throw;
    std::string msg = e.what();
    msg.erase(0, to_string(ErrorCode::ParseError).size() + 2);
    fail(ErrorCode::ParseError, path.string() + ": " + msg);
  }
}

inline json names_json(const Domain& d, const State& s) { return json(d.names(s)); }

/// Canonical text: keys sorted, one state per line.
inline std::string format_space(const SpaceDocument& doc) {
  const auto& d = doc.structure.domain();
  std::map<std::string, std::string> fields;
  fields["format_version"] = std::to_string(kFormatVersion);
  fields["domain"] = json(d.items()).dump();
  std::string states = "[";
  for (std::size_t i = 0; i < doc.structure.size(); ++i) {
    states += i ? ",\n    " : "\n    ";
    states += names_json(d, doc.structure.state(i)).dump();
  }
  states += doc.structure.size() ? "\n  ]" : "]";
  fields["states"] = states;
  if (doc.distribution) fields["distribution"] = json(*doc.distribution).dump();
  if (doc.name) fields["name"] = json(*doc.name).dump();
  if (doc.description) fields["description"] = json(*doc.description).dump();
  if (!doc.display_text.empty()) fields["display_text"] = json(doc.display_text).dump();
  for (const auto& [k, v] : doc.extra.items()) fields[k] = v.dump();
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : fields) {
    out += first ? "\n  " : ",\n  ";
    first = false;
    out += json(k).dump() + ": " + v;
  }
  return out + "\n}\n";
}

inline void save_space(const SpaceDocument& doc, const std::filesystem::path& path) {
  write_file(path, format_space(doc));
}

inline SpaceDocument make_document(const KnowledgeStructure& k) {
  SpaceDocument d;
  d.structure = k;
  return d;
}

// ---------------------------------------------------------------------------
// Response vectors (for the data oracle): {"format_version":1, "domain":[..],
// "responses":[[correct items], ...]}

inline std::vector<State> parse_responses(std::string_view text, const Domain& domain) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    detail::parse_fail(text, e.byte > 0 ? e.byte - 1 : 0, "malformed JSON");
  }
  if (!doc.is_object()) detail::parse_fail(text, 0, "top level must be an object");
  if (auto it = doc.find("domain"); it != doc.end() && detail::string_list(text, *it, "domain") != domain.items())
    detail::parse_fail(text, detail::locate(text, "domain", ""), "domain differs from the space's domain");
  const auto& rs = detail::require(text, doc, "responses");
  if (!rs.is_array()) detail::parse_fail(text, detail::locate(text, "responses", ""), "must be an array");
  std::vector<State> out;
  for (const auto& r : rs) {
    State s(domain.size());
    for (const auto& n : detail::string_list(text, r, "responses")) {
      auto i = domain.find(n);
      if (!i) detail::parse_fail(text, detail::locate(text, "responses", n), "unknown item '" + n + "'");
      s.set(*i);
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string format_responses(const Domain& domain, const std::vector<State>& responses) {
  std::string out = "{\n  \"domain\": " + json(domain.items()).dump() + ",\n  \"format_version\": 1,\n  \"responses\": [";
  for (std::size_t i = 0; i < responses.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += names_json(domain, responses[i]).dump();
  }
  return out + (responses.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

// ---------------------------------------------------------------------------
// JSON views shared by the CLI and the service

inline json transcript_json(const Domain& d, const std::vector<TranscriptRecord>& t) {
  json out = json::array();
  for (const auto& r : t)
    out.push_back({{"trial", r.trial},
                   {"item", d.item(r.item)},
                   {"response", r.response},
                   {"max_prob", r.max_prob},
                   {"entropy", r.entropy}});
  return out;
}

inline json flags_json(const PropertyFlags& p) {
  return {{"union_closed", p.union_closed},     {"intersection_closed", p.intersection_closed},
          {"well_graded", p.well_graded},       {"accessible", p.accessible},
          {"discriminative", p.discriminative}, {"learning_space", p.learning_space},
          {"quasi_ordinal", p.quasi_ordinal()}, {"ordinal", p.ordinal()}};
}

}  // namespace kst
