// kst: command-line front end for the knowledge-space library.

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "kst/http_service.hpp"
#include "kst/kst.hpp"

using namespace kst;

namespace {

bool as_json = false;

void emit(const json& j, const std::string& text) {
  if (as_json) std::cout << j.dump(2) << "\n";
  else std::cout << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

bool single_letter_items(const Domain& d) {
  for (const auto& i : d.items())
    if (i.size() != 1) return false;
  return true;
}

/// "c,d" or, with one-letter items, "cd". "{}" and "" give the empty set.
State parse_items(const Domain& d, std::string arg) {
  if (arg.size() >= 2 && arg.front() == '{' && arg.back() == '}') arg = arg.substr(1, arg.size() - 2);
  if (arg.empty()) return d.empty_state();
  if (arg.find(',') == std::string::npos && !d.find(arg) && single_letter_items(d)) return d.parse_letters(arg);
  auto names = split(arg, ',');
  return d.make_state(names);
}

/// A word is "abdc" with one-letter items, otherwise "x.y.z".
Word parse_cli_word(const Domain& d, const std::string& arg) {
  if (arg.find('.') != std::string::npos || !single_letter_items(d)) return parse_word(d, split(arg, '.'));
  return parse_word(d, std::string_view(arg));
}

std::string word_text(const Domain& d, const Word& w) {
  if (single_letter_items(d)) return format_word(d, w);
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "." : "") + d.item(w[i]);
  return out;
}

json word_json(const Domain& d, const Word& w) {
  json out = json::array();
  for (auto i : w) out.push_back(d.item(i));
  return out;
}

json family_json(const StateFamily& f) {
  json out = json::array();
  for (const auto& s : f) out.push_back(names_json(f.domain(), s));
  return out;
}

json states_json(const Domain& d, const std::vector<State>& v) {
  json out = json::array();
  for (const auto& s : v) out.push_back(names_json(d, s));
  return out;
}

std::string states_text(const Domain& d, const std::vector<State>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + d.format(v[i]);
  return out;
}

std::string yes(bool b) { return b ? "yes" : "no"; }

std::vector<State> parse_blocks(const Domain& d, const std::string& arg) {
  std::vector<State> out;
  for (const auto& b : split(arg, '/')) out.push_back(parse_items(d, b));
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge and learning space tools"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::string file;
  auto add_file = [&](CLI::App* sub) { sub->add_option("file", file, "Space file (JSON)")->required(); };

  auto* validate = app.add_subcommand("validate", "Parse a space file and report its size");
  add_file(validate);

  auto* classify_cmd = app.add_subcommand("classify", "Structural properties and the learning axioms");
  add_file(classify_cmd);

  auto* base_cmd = app.add_subcommand("base", "Base of a knowledge space");
  add_file(base_cmd);

  std::string item;
  auto* atoms_cmd = app.add_subcommand("atoms", "Atoms at every item (or at --item)");
  add_file(atoms_cmd);
  atoms_cmd->add_option("--item", item);

  std::string state_arg;
  auto* fringes_cmd = app.add_subcommand("fringes", "Inner and outer fringe of a state");
  add_file(fringes_cmd);
  fringes_cmd->add_option("state", state_arg, "Items, e.g. c,g,h")->required();

  std::string items_arg, out_path;
  auto* project_cmd = app.add_subcommand("project", "Projection on a subdomain");
  add_file(project_cmd);
  project_cmd->add_option("--items", items_arg, "Subdomain, e.g. c,d")->required();
  project_cmd->add_option("--out", out_path, "Write the projected space here");

  auto* children_cmd = app.add_subcommand("children", "Children of a projection");
  add_file(children_cmd);
  children_cmd->add_option("--items", items_arg)->required();

  std::size_t limit = 1000;
  auto* strings_cmd = app.add_subcommand("strings", "Learning strings (listing capped by --limit)");
  add_file(strings_cmd);
  strings_cmd->add_option("--limit", limit);

  std::string domain_arg, compare_path;
  std::vector<std::string> words;
  auto* encode_cmd = app.add_subcommand("encode", "Space encoded by a set of strings");
  encode_cmd->add_option("--domain", domain_arg, "Items, e.g. a,b,c,d")->required();
  encode_cmd->add_option("words", words, "Strings, e.g. abdc bdca")->required();
  encode_cmd->add_option("--compare", compare_path, "Report whether the result equals this space");
  encode_cmd->add_option("--out", out_path);

  auto* cover_cmd = app.add_subcommand("cover", "Greedy string cover of a learning space");
  add_file(cover_cmd);

  std::size_t runs = 100;
  double beta = 0.0, eta = 0.0, zeta = 2.0, threshold = 0.95, theta = 0.9;
  std::size_t max_trials = 200, block_limit = 2;
  std::uint64_t seed = 1;
  std::string save_responses, blocks_arg, latent_arg;
  auto add_sim = [&](CLI::App* sub) {
    add_file(sub);
    sub->add_option("--runs", runs);
    sub->add_option("--beta", beta, "Careless error rate");
    sub->add_option("--eta", eta, "Lucky guess rate");
    sub->add_option("--seed", seed);
    sub->add_option("--zeta", zeta);
    sub->add_option("--threshold", threshold);
    sub->add_option("--max-trials", max_trials);
  };
  auto* assess_cmd = app.add_subcommand("assess-sim", "Simulated assessments with drawn latent states");
  add_sim(assess_cmd);
  assess_cmd->add_option("--latent", latent_arg, "Fixed latent state instead of uniform draws");
  assess_cmd->add_option("--save-responses", save_responses, "Write response vectors for build-query");

  auto* parallel_cmd = app.add_subcommand("parallel-sim", "Simulated assessments over a partition");
  add_sim(parallel_cmd);
  parallel_cmd->add_option("--blocks", blocks_arg, "Partition, e.g. a,b,c/d,e")->required();

  auto* extra_cmd = app.add_subcommand("extra-problem", "Contingency table and phi for an extra item");
  add_sim(extra_cmd);

  std::string routine = "adjusted", oracle_kind = "truthful", responses_path;
  bool antisymmetry = false;
  auto* build_cmd = app.add_subcommand("build-query", "Build a learning space from query answers");
  build_cmd->add_option("file", file, "Space file; its domain is used, and it is the target for truthful")
      ->required();
  build_cmd->add_option("--routine", routine)->check(CLI::IsMember({"adapted", "adjusted"}));
  build_cmd->add_option("--oracle", oracle_kind)->check(CLI::IsMember({"truthful", "data", "interactive"}));
  build_cmd->add_option("--responses", responses_path, "Response vectors for the data oracle");
  build_cmd->add_option("--theta", theta);
  build_cmd->add_option("--block-limit", block_limit);
  build_cmd->add_flag("--antisymmetry", antisymmetry, "Infer (q,r) negative from a positive (r,q) in Block 1");
  build_cmd->add_option("--out", out_path);

  std::string host = "0.0.0.0", data_dir;
  int port = 0;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP session service (PORT, DATA_DIR from the environment)");
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--data-dir", data_dir);

  CLI11_PARSE(app, argc, argv);
  as_json = format == "json";

  try {
    if (*validate) {
      auto doc = load_space(file);
      const auto& k = doc.structure;
      json warnings = json::array();
      if (k.had_duplicates()) {
        warnings.push_back("repeated states were merged");
        std::cerr << "warning: repeated states were merged\n";
      }
      emit({{"valid", true}, {"items", k.domain().size()}, {"states", k.size()}, {"warnings", warnings}},
           "valid: " + std::to_string(k.domain().size()) + " items, " + std::to_string(k.size()) + " states\n");
      return 0;
    }

    if (*classify_cmd) {
      auto k = load_space(file).structure;
      auto flags = classify(k);
      auto ax = check_l1_l2(k);
      const auto& d = k.domain();
      json j = flags_json(flags);
      j["l1"] = ax.l1.holds;
      j["l2"] = ax.l2.holds;
      std::string t;
      t += "union closed:        " + yes(flags.union_closed) + "\n";
      t += "intersection closed: " + yes(flags.intersection_closed) + "\n";
      t += "well graded:         " + yes(flags.well_graded) + "\n";
      t += "accessible:          " + yes(flags.accessible) + "\n";
      t += "discriminative:      " + yes(flags.discriminative) + "\n";
      t += "quasi ordinal:       " + yes(flags.quasi_ordinal()) + "\n";
      t += "ordinal:             " + yes(flags.ordinal()) + "\n";
      t += "L1:                  " + yes(ax.l1.holds);
      if (ax.l1.witness) {
        j["l1_witness"] = {{"k", names_json(d, ax.l1.witness->first)}, {"l", names_json(d, ax.l1.witness->second)}};
        t += "  (K=" + d.format(ax.l1.witness->first) + ", L=" + d.format(ax.l1.witness->second) + ")";
      }
      t += "\nL2:                  " + yes(ax.l2.holds);
      if (ax.l2.witness) {
        const auto& w = *ax.l2.witness;
        j["l2_witness"] = {{"k", names_json(d, w.k)}, {"l", names_json(d, w.l)}, {"item", d.item(w.item)}};
        t += "  (K=" + d.format(w.k) + ", L=" + d.format(w.l) + ", q=" + d.item(w.item) + ")";
      }
      t += "\nlearning space:      " + yes(flags.learning_space) + "\n";
      emit(j, t);
      return 0;
    }

    if (*base_cmd) {
      auto k = load_space(file).structure;
      auto b = base(k);
      emit({{"base", states_json(k.domain(), b)}, {"size", b.size()}},
           "base (" + std::to_string(b.size()) + "): " + states_text(k.domain(), b) + "\n");
      return 0;
    }

    if (*atoms_cmd) {
      auto k = load_space(file).structure;
      const auto& d = k.domain();
      json j = json::object();
      std::string t;
      for (std::size_t q = 0; q < d.size(); ++q) {
        if (!item.empty() && d.item(q) != item) continue;
        auto a = atoms_at(k, q);
        j[d.item(q)] = states_json(d, a);
        t += d.item(q) + ": " + states_text(d, a) + "\n";
      }
      if (!item.empty()) d.index_of(item);  // unknown item is an error
      emit(j, t);
      return 0;
    }

    if (*fringes_cmd) {
      auto k = load_space(file).structure;
      const auto& d = k.domain();
      auto s = parse_items(d, state_arg);
      auto fr = fringes(k, s);
      emit({{"state", names_json(d, s)}, {"inner", names_json(d, fr.inner)}, {"outer", names_json(d, fr.outer)}},
           "state " + d.format(s) + "\ninner " + d.format(fr.inner) + "\nouter " + d.format(fr.outer) + "\n");
      return 0;
    }

    if (*project_cmd) {
      auto doc = load_space(file);
      auto sub = parse_items(doc.structure.domain(), items_arg);
      auto p = project(doc.structure, sub);
      auto flags = classify(p.structure);
      if (!out_path.empty()) {
        auto out = make_document(p.structure);
        if (doc.distribution)
          out.distribution = project_distribution(StateDistribution(doc.structure, *doc.distribution), sub).probs();
        save_space(out, out_path);
      }
      emit({{"domain", p.sub_domain->items()}, {"states", family_json(p.structure)}, {"flags", flags_json(flags)}},
           p.structure.format() + "\nlearning space: " + yes(flags.learning_space) + "\n");
      return 0;
    }

    if (*children_cmd) {
      auto k = load_space(file).structure;
      const auto& d = k.domain();
      const auto sub = parse_items(d, items_arg);
      auto ch = children(k, sub);
      json j = json::array();
      std::string t;
      for (const auto& c : ch) {
        const auto trace = lift_from(c.trace, sub.indices(), d.size());
        const bool has_empty = c.child.contains(c.child.domain().empty_state());
        j.push_back({{"trace", names_json(d, trace)},
                     {"common", names_json(d, c.common)},
                     {"domain", c.child_domain->items()},
                     {"states", family_json(c.child)},
                     {"contains_empty", has_empty},
                     {"union_stable", is_union_stable(c.child)},
                     {"well_graded", is_well_graded(c.child)}});
        t += "trace " + d.format(trace) + ": " + c.child.format() + "\n";
      }
      emit(j, t);
      return 0;
    }

    if (*strings_cmd) {
      auto k = load_space(file).structure;
      const auto& d = k.domain();
      auto en = learning_strings(k, limit);
      json list = json::array();
      std::string t = "total " + en.total.str() + "\n";
      for (const auto& w : en.strings) {
        list.push_back(word_json(d, w));
        t += word_text(d, w) + "\n";
      }
      emit({{"total", en.total.str()}, {"strings", list}}, t);
      return 0;
    }

    if (*encode_cmd) {
      auto d = make_domain(split(domain_arg, ','));
      std::vector<Word> ws;
      for (const auto& w : words) ws.push_back(parse_cli_word(*d, w));
      auto k = encode_space_from_strings(d, ws);
      json j{{"states", family_json(k)}, {"learning_space", is_learning_space(k)}};
      std::string t = k.format() + "\n";
      if (!compare_path.empty()) {
        auto target = load_space(compare_path).structure;
        const bool same = target.domain() == *d && target == k;
        j["equals"] = same;
        t += "equals compared space: " + yes(same) + "\n";
      }
      if (!out_path.empty()) save_space(make_document(k), out_path);
      emit(j, t);
      return 0;
    }

    if (*cover_cmd) {
      auto k = load_space(file).structure;
      const auto& d = k.domain();
      auto c = greedy_string_cover(k);
      json list = json::array();
      std::string t = "cover of size " + std::to_string(c.size()) + "\n";
      for (const auto& w : c) {
        list.push_back(word_json(d, w));
        t += word_text(d, w) + "\n";
      }
      emit({{"size", c.size()}, {"strings", list}}, t);
      return 0;
    }

    const auto params_for = [&](std::size_t n) {
      auto p = ResponseParams::uniform(n, beta, eta);
      p.validate(n);
      return p;
    };
    const auto responder_for = [&](const State& latent, const ResponseParams& p) {
      return eta > 0 ? Responder::careless_lucky(latent, p) : Responder::careless(latent, p);
    };

    if (*assess_cmd || *parallel_cmd) {
      auto doc = load_space(file);
      const auto& k = doc.structure;
      const auto n = k.domain().size();
      auto p = params_for(n);
      const StopRule stop{threshold, max_trials};
      const auto z = ZetaTable::uniform(n, zeta);
      std::optional<State> fixed;
      if (!latent_arg.empty()) {
        fixed = parse_items(k.domain(), latent_arg);
        if (!k.contains(*fixed)) fail(ErrorCode::StateNotInStructure, "latent state is not a state of the space");
      }
      std::vector<State> blocks;
      if (*parallel_cmd) blocks = parse_blocks(k.domain(), blocks_arg);
      auto initial = doc.distribution ? StateDistribution(k, *doc.distribution) : uniform_distribution(k);
      Rng pick(seed);
      std::size_t hits = 0, questions = 0;
      std::vector<State> responses;
      for (std::size_t r = 0; r < runs; ++r) {
        const State latent = fixed ? *fixed : k.state(uniform_index(pick, k.size()));
        const auto who = responder_for(latent, p);
        State got;
        if (*parallel_cmd) {
          auto res = parallel_assessment(k, blocks, who, stop, z, seed + r);
          got = res.final_state;
          questions += res.transcript.size();
        } else {
          auto res = run_assessment(initial, who, stop, z, seed + r);
          got = res.final_state;
          questions += res.transcript.size();
          responses.push_back(response_vector(res));
        }
        hits += got == latent;
      }
      if (!save_responses.empty()) write_file(save_responses, format_responses(k.domain(), responses));
      const double rate = runs ? static_cast<double>(hits) / static_cast<double>(runs) : 0.0;
      const double mean_q = runs ? static_cast<double>(questions) / static_cast<double>(runs) : 0.0;
      emit({{"runs", runs}, {"recovered", hits}, {"recovery_rate", rate}, {"mean_questions", mean_q}},
           "runs " + std::to_string(runs) + "\nrecovered " + std::to_string(hits) + " (" + fmt(100 * rate) +
               "%)\nmean questions " + fmt(mean_q) + "\n");
      return 0;
    }

    if (*extra_cmd) {
      auto k = load_space(file).structure;
      const auto n = k.domain().size();
      auto res = extra_problem_metrics(k, runs, params_for(n), seed, StopRule{threshold, max_trials},
                                       ZetaTable::uniform(n, zeta));
      const auto& t = res.table;
      json phi = std::isnan(res.phi) ? json(nullptr) : json(res.phi);
      emit({{"table", {{"in_correct", t.x}, {"in_false", t.y}, {"out_correct", t.z}, {"out_false", t.w}}},
            {"phi", phi},
            {"recovered", res.recovered}},
           "                correct  false\nin state    " + std::to_string(t.x) + "  " + std::to_string(t.y) +
               "\nnot in state " + std::to_string(t.z) + "  " + std::to_string(t.w) + "\nphi " + fmt(res.phi) +
               "\n");
      return 0;
    }

    if (*build_cmd) {
      auto doc = load_space(file);
      const auto& k = doc.structure;
      const auto& d = k.domain();
      std::optional<QueryOracle> oracle;
      if (oracle_kind == "truthful") {
        oracle = QueryOracle::truthful(k);
      } else if (oracle_kind == "data") {
        if (responses_path.empty()) fail(ErrorCode::BadRequest, "--responses is required for the data oracle");
        oracle = QueryOracle::data(parse_responses(read_file(responses_path), d), theta);
      } else {
        oracle = QueryOracle("interactive", [&d](const State& a, std::size_t q) {
          while (true) {
            std::cerr << "Failing all of " << d.format(a) << ", does a student fail " << d.item(q) << "? [y/n] ";
            std::string line;
            if (!std::getline(std::cin, line)) fail(ErrorCode::OracleFailure, "no answer on standard input");
            if (line == "y" || line == "yes") return true;
            if (line == "n" || line == "no") return false;
          }
        });
      }
      Block1Options opt{antisymmetry};
      auto st = routine == "adapted" ? adapted_query_run(k.domain_ptr(), *oracle, block_limit, opt)
                                     : adjusted_query_run(k.domain_ptr(), *oracle, block_limit, opt);
      if (!out_path.empty()) save_space(make_document(st.current), out_path);
      json audit = json::array();
      for (const auto& e : st.audit)
        audit.push_back({{"antecedent", names_json(d, e.query.antecedent)},
                         {"item", d.item(e.query.item)},
                         {"removed", states_json(d, e.removed)},
                         {"fatal", e.fatal}});
      json pending = json::array();
      for (const auto& q : st.pending)
        pending.push_back({{"antecedent", names_json(d, q.antecedent)}, {"item", d.item(q.item)}});
      const bool matches = st.current == k;
      emit({{"states", family_json(st.current)},
            {"size", st.current.size()},
            {"oracle_calls", st.oracle_calls},
            {"exited", st.exited},
            {"audit", audit},
            {"pending", pending},
            {"equals_input", matches}},
           "states " + std::to_string(st.current.size()) + "\noracle calls " + std::to_string(st.oracle_calls) +
               "\nremovals " + std::to_string(st.audit.size()) + "\npending " + std::to_string(st.pending.size()) +
               (st.exited ? "\nexited on a fatal query" : "") + "\nequals input space: " + yes(matches) + "\n" +
               st.current.format() + "\n");
      return 0;
    }

    if (*serve_cmd) {
      if (port == 0) {
        const char* env = std::getenv("PORT");
        port = env ? std::atoi(env) : 8080;
      }
      if (data_dir.empty()) {
        const char* env = std::getenv("DATA_DIR");
        data_dir = env ? env : "./kst-data";
      }
      SessionService svc(data_dir);
      serve(svc, host, port, [&](httplib::Server&) {
        std::cerr << "listening on " << host << ":" << port << ", data in " << data_dir << "\n";
      });
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
