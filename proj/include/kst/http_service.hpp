#pragma once

// Pulls in httplib; include from as few translation units as possible.

#include <functional>
#include <optional>
#include <string>

#include <httplib.h>

#include "kst/service.hpp"

namespace kst {

namespace detail {

inline std::optional<std::string> idem_key(const httplib::Request& req) {
  if (!req.has_header("Idempotency-Key")) return std::nullopt;
  return req.get_header_value("Idempotency-Key");
}

inline void send(httplib::Response& res, const SessionService::Reply& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json; charset=utf-8");
}

template <typename F>
httplib::Server::Handler wrap(F&& f) {
  return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, f(req));
    } catch (const Error& e) {
      send(res, SessionService::error_reply(e));
    } catch (const std::exception& e) {
      send(res, {500, {{"error", "Internal"}, {"message", e.what()}}});
    }
  };
}

}  // namespace detail

/// Registers the service endpoints (and permissive CORS headers) on `srv`.
inline void bind_routes(httplib::Server& srv, SessionService& svc) {
  using detail::wrap;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type, Idempotency-Key"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Post("/spaces", wrap([&](const httplib::Request& r) { return svc.create_space(r.body, detail::idem_key(r)); }));
  srv.Get(R"(/spaces/([^/]+))", wrap([&](const httplib::Request& r) { return svc.get_space(r.matches[1]); }));
  srv.Get(R"(/spaces/([^/]+)/summary)",
          wrap([&](const httplib::Request& r) { return svc.space_summary(r.matches[1]); }));
  srv.Post(R"(/spaces/([^/]+)/sessions)", wrap([&](const httplib::Request& r) {
             return svc.create_session(r.matches[1], r.body, detail::idem_key(r));
           }));
  srv.Get(R"(/sessions/([^/]+)/next)", wrap([&](const httplib::Request& r) { return svc.next(r.matches[1]); }));
  srv.Post(R"(/sessions/([^/]+)/answer)", wrap([&](const httplib::Request& r) {
             return svc.answer(r.matches[1], r.body, detail::idem_key(r));
           }));
  srv.Get(R"(/sessions/([^/]+)/result)", wrap([&](const httplib::Request& r) { return svc.result(r.matches[1]); }));
}

/// Blocks serving on host:port. Throws BindError when the port is taken.
inline void serve(SessionService& svc, const std::string& host, int port,
                  const std::function<void(httplib::Server&)>& on_ready = {}) {
  httplib::Server srv;
  bind_routes(srv, svc);
  if (!srv.bind_to_port(host, port)) fail(ErrorCode::BindError, "cannot bind " + host + ":" + std::to_string(port));
  if (on_ready) on_ready(srv);
  srv.listen_after_bind();
}

}  // namespace kst
