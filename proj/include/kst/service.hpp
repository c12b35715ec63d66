#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "kst/assessment.hpp"
#include "kst/base_surmise.hpp"
#include "kst/io.hpp"

namespace kst {

/// Transport-independent session service. Every mutation is appended to
/// DATA_DIR/store.jsonl before it is acknowledged; on start the log is
/// replayed, which rebuilds every session exactly since sessions are
/// deterministic given their seed and answers.
class SessionService {
 public:
  struct Reply {
    int status = 200;
    json body;
  };

  explicit SessionService(std::filesystem::path data_dir) : dir_(std::move(data_dir)) {
    std::filesystem::create_directories(dir_);
    replay();
    store_.open(store_path(), std::ios::app | std::ios::binary);
    if (!store_) fail(ErrorCode::StoreCorruption, "cannot open " + store_path().string() + " for appending");
  }

  std::filesystem::path store_path() const { return dir_ / "store.jsonl"; }

  // -- endpoints ----------------------------------------------------------

  Reply create_space(const std::string& body, const std::optional<std::string>& idem = {}) {
    return idempotent("POST /spaces", idem, [&] {
      auto doc = parse_space(body);
      std::unique_lock lock(mu_);
      const auto id = "space-" + std::to_string(spaces_.size() + 1);
      append({{"type", "space"}, {"id", id}, {"document", format_space(doc)}});
      spaces_[id] = std::make_shared<const SpaceDocument>(std::move(doc));
      return Reply{201, {{"id", id}}};
    });
  }

  Reply get_space(const std::string& id) const {
    auto sp = space(id);
    return {200, json::parse(format_space(*sp))};
  }

  Reply space_summary(const std::string& id) const {
    auto sp = space(id);
    const auto& k = sp->structure;
    json body{{"id", id},
              {"items", k.domain().size()},
              {"states", k.size()},
              {"flags", flags_json(classify(k))}};
    body["base_size"] = is_union_closed(k) ? json(base(k).size()) : json(nullptr);
    if (sp->name) body["name"] = *sp->name;
    return {200, body};
  }

  /// Body: {seed, zeta, threshold, max_trials, mode: "interactive" |
  /// "simulated", latent: [items], beta}. All optional.
  Reply create_session(const std::string& space_id, const std::string& body,
                       const std::optional<std::string>& idem = {}) {
    return idempotent("POST /spaces/" + space_id + "/sessions", idem, [&] {
      auto sp = space(space_id);
      json cfg = body.empty() ? json::object() : parse_body(body);
      auto session = make_session(sp, cfg);  // validates
      std::unique_lock lock(mu_);
      const auto id = "session-" + std::to_string(sessions_.size() + 1);
      append({{"type", "session"}, {"id", id}, {"space", space_id}, {"config", cfg}});
      sessions_[id] = session;
      return Reply{201, {{"id", id}}};
    });
  }

  Reply next(const std::string& id) {
    auto s = session(id);
    std::lock_guard lock(s->mu);
    if (s->run.finished()) return {200, {{"status", "finished"}, {"trial", s->run.belief().trial}}};
    const auto q = s->run.next_item();
    const auto& d = s->doc->structure.domain();
    return {200,
            {{"status", "active"},
             {"item", d.item(q)},
             {"display_text", s->doc->display(q)},
             {"trial", s->run.belief().trial},
             {"max_prob", s->run.belief().dist.max_prob()}}};
  }

  /// Body: {item, correct}. `correct` may be left out in simulated mode.
  Reply answer(const std::string& id, const std::string& body, const std::optional<std::string>& idem = {}) {
    return idempotent("POST /sessions/" + id + "/answer", idem, [&] {
      auto s = session(id);
      json req = parse_body(body);
      std::lock_guard lock(s->mu);
      if (s->run.finished()) fail(ErrorCode::SessionFinished, "session " + id + " is finished");
      const auto q = s->run.next_item();
      const auto& d = s->doc->structure.domain();
      if (auto it = req.find("item"); it != req.end()) {
        if (!it->is_string() || it->get<std::string>() != d.item(q))
          fail(ErrorCode::BadRequest, "the pending question is '" + d.item(q) + "'");
      }
      int r;
      bool simulated = false;
      if (auto it = req.find("correct"); it != req.end() && !it->is_null()) {
        if (!it->is_boolean()) fail(ErrorCode::BadRequest, "'correct' must be a boolean");
        r = it->get<bool>() ? 1 : 0;
      } else if (s->responder) {
        r = simulate_response(*s->responder, q, s->answers);
        simulated = true;
      } else {
        fail(ErrorCode::BadRequest, "'correct' is required for interactive sessions");
      }
      s->run.answer(r);
      const auto& probs = s->run.belief().dist.probs();
      {
        std::unique_lock store_lock(mu_);
        append({{"type", "answer"}, {"session", id}, {"item", d.item(q)}, {"correct", r == 1},
                {"simulated", simulated}, {"belief", probs}});
      }
      return Reply{200,
                   {{"status", s->run.finished() ? "finished" : "active"},
                    {"item", d.item(q)},
                    {"correct", r == 1},
                    {"trial", s->run.belief().trial},
                    {"max_prob", s->run.belief().dist.max_prob()}}};
    });
  }

  Reply result(const std::string& id) {
    auto s = session(id);
    std::lock_guard lock(s->mu);
    if (!s->run.finished()) fail(ErrorCode::SessionFinished, "session " + id + " is still running");
    auto res = s->run.result();
    const auto& d = s->doc->structure.domain();
    return {200,
            {{"status", "finished"},
             {"state", names_json(d, res.final_state)},
             {"inner_fringe", names_json(d, res.fringes.inner)},
             {"outer_fringe", names_json(d, res.fringes.outer)},
             {"transcript", transcript_json(d, res.transcript)},
             {"warnings", res.warnings}}};
  }

  /// Maps an error to an HTTP status and body.
  static Reply error_reply(const Error& e) {
    int status = 400;
    switch (e.code()) {
      case ErrorCode::SessionNotFound:
      case ErrorCode::SpaceNotFound: status = 404; break;
      case ErrorCode::SessionFinished: status = 409; break;
      case ErrorCode::StoreCorruption: status = 500; break;
      default: break;
    }
    return {status, {{"error", to_string(e.code())}, {"message", e.what()}}};
  }

 private:
  struct Session {
    std::mutex mu;
    std::shared_ptr<const SpaceDocument> doc;
    Assessment run;
    std::optional<Responder> responder;
    Rng answers;

    Session(std::shared_ptr<const SpaceDocument> d, Assessment a, std::optional<Responder> who, Rng rng)
        : doc(std::move(d)), run(std::move(a)), responder(std::move(who)), answers(rng) {}
  };

  static json parse_body(const std::string& body) {
    try {
      auto j = json::parse(body);
      if (!j.is_object()) fail(ErrorCode::BadRequest, "request body must be an object");
      return j;
    } catch (const json::parse_error&) {
      fail(ErrorCode::BadRequest, "request body is not valid JSON");
    }
  }

  static std::shared_ptr<Session> make_session(std::shared_ptr<const SpaceDocument> sp, const json& cfg) {
    try {
      const auto& k = sp->structure;
      const auto n = k.domain().size();
      const std::uint64_t seed = cfg.value("seed", std::uint64_t{1});
      const double zeta = cfg.value("zeta", 2.0);
      StopRule stop{cfg.value("threshold", 0.95), cfg.value("max_trials", std::size_t{200})};
      const std::string mode = cfg.value("mode", std::string("interactive"));
      std::optional<Responder> who;
      if (mode == "simulated") {
        if (!cfg.contains("latent")) fail(ErrorCode::BadRequest, "simulated sessions need 'latent'");
        State latent = k.domain().make_state(cfg["latent"].get<std::vector<std::string>>());
        if (!k.contains(latent)) fail(ErrorCode::StateNotInStructure, "latent state is not a state of the space");
        who = Responder::careless(latent, ResponseParams::uniform(n, cfg.value("beta", 0.0)));
      } else if (mode != "interactive") {
        fail(ErrorCode::BadRequest, "mode must be 'interactive' or 'simulated'");
      }
      auto initial = sp->distribution ? StateDistribution(k, *sp->distribution) : uniform_distribution(k);
      Assessment a(std::move(initial), ZetaTable::uniform(n, zeta), stop, seed);
      return std::make_shared<Session>(std::move(sp), std::move(a), std::move(who), Rng(responder_seed(seed)));
    } catch (const json::exception& e) {
      fail(ErrorCode::BadRequest, std::string("bad session options: ") + e.what());
    }
  }

  std::shared_ptr<const SpaceDocument> space(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = spaces_.find(id);
    if (it == spaces_.end()) fail(ErrorCode::SpaceNotFound, "no space '" + id + "'");
    return it->second;
  }

  std::shared_ptr<Session> session(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) fail(ErrorCode::SessionNotFound, "no session '" + id + "'");
    return it->second;
  }

  /// Runs `op` once per (route, key); retries get the stored reply. Errors
  /// are not remembered, so a failed request can be retried.
  template <typename Op>
  Reply idempotent(const std::string& route, const std::optional<std::string>& key, Op&& op) {
    if (!key) return op();
    const auto full = route + "\n" + *key;
    std::lock_guard guard(idem_mu_);
    {
      std::shared_lock lock(mu_);
      if (auto it = idem_.find(full); it != idem_.end()) return it->second;
    }
    Reply r = op();
    std::unique_lock lock(mu_);
    append({{"type", "idem"}, {"key", full}, {"status", r.status}, {"body", r.body}});
    idem_[full] = r;
    return r;
  }

  void append(const json& record) {
    store_ << record.dump() << '\n';
    store_.flush();
  }

  void replay() {
    if (!std::filesystem::exists(store_path())) return;
    std::ifstream in(store_path(), std::ios::binary);
    std::string line;
    std::size_t lineno = 0;
    auto corrupt = [&](const std::string& why) {
      fail(ErrorCode::StoreCorruption, store_path().string() + " line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json rec;
      try {
        rec = json::parse(line);
        const auto type = rec.at("type").get<std::string>();
        if (type == "space") {
          spaces_[rec.at("id").get<std::string>()] =
              std::make_shared<const SpaceDocument>(parse_space(rec.at("document").get<std::string>()));
        } else if (type == "session") {
          auto sp = spaces_.at(rec.at("space").get<std::string>());
          sessions_[rec.at("id").get<std::string>()] = make_session(sp, rec.at("config"));
        } else if (type == "answer") {
          auto& s = *sessions_.at(rec.at("session").get<std::string>());
          const auto q = s.run.next_item();
          if (s.doc->structure.domain().item(q) != rec.at("item").get<std::string>())
            corrupt("answer does not match the replayed question");
          const int r = rec.at("correct").get<bool>() ? 1 : 0;
          if (rec.value("simulated", false)) {
            if (!s.responder) corrupt("simulated answer in an interactive session");
            if (simulate_response(*s.responder, q, s.answers) != r) corrupt("simulated answer does not replay");
          }
          s.run.answer(r);
          if (rec.at("belief").get<std::vector<double>>() != s.run.belief().dist.probs())
            corrupt("replayed belief differs from the stored snapshot");
        } else if (type == "idem") {
          idem_[rec.at("key").get<std::string>()] = Reply{rec.at("status").get<int>(), rec.at("body")};
        } else {
          corrupt("unknown record type '" + type + "'");
        }
      } catch (const json::exception& e) {
        corrupt(e.what());
      } catch (const std::out_of_range& e) {
        corrupt(std::string("dangling reference: ") + e.what());
      } catch (const Error& e) {
        if (e.code() == ErrorCode::StoreCorruption) throw;
        corrupt(e.what());
      }
    }
  }

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;  // maps and store
  std::mutex idem_mu_;
  std::map<std::string, std::shared_ptr<const SpaceDocument>> spaces_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, Reply> idem_;
  std::ofstream store_;
};

}  // namespace kst
