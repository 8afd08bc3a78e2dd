#include "vericode/service/http_server.hpp"

#include <httplib.h>

namespace vericode {

using nlohmann::json;

struct HttpServer::Impl {
  Impl(SessionService& s, HttpOptions o) : service(s), options(std::move(o)) {}
  SessionService& service;
  HttpOptions options;
  httplib::Server server;
  int port = -1;
};

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("request body is not JSON: ") + e.what());
  }
}

// Runs a handler and maps library exceptions onto statuses.
template <typename F>
httplib::Server::Handler wrap(F f, int ok_status = 200) {
  return [f, ok_status](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, ok_status, f(req));
    } catch (const NotFound& e) {
      send_error(res, 404, "not_found", e.what());
    } catch (const Conflict& e) {
      send_error(res, 409, "conflict", e.what());
    } catch (const SessionFinished& e) {
      send_error(res, 409, "finished", e.what());
    } catch (const ConfigError& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const FormatError& e) {
      send_error(res, 500, "corrupt", e.what());
    } catch (const IoError& e) {
      send_error(res, 500, "storage", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

HttpServer::HttpServer(SessionService& service, HttpOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto& s = impl_->server;
  auto& svc = impl_->service;

  const auto token = impl_->options.token;
  s.set_pre_routing_handler([token](const httplib::Request& req, httplib::Response& res) {
    if (token.empty() || req.path == "/v1/health") return httplib::Server::HandlerResponse::Unhandled;
    if (req.get_header_value("Authorization") == "Bearer " + token) return httplib::Server::HandlerResponse::Unhandled;
    send_error(res, 401, "unauthorized", "missing or wrong bearer token");
    return httplib::Server::HandlerResponse::Handled;
  });
  s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty()) send_error(res, res.status, "not_found", "no route for " + req.method + " " + req.path);
  });

  s.Get("/v1/health", wrap([&svc](const httplib::Request&) { return svc.health(); }));

  s.Get("/v1/setups", wrap([&svc](const httplib::Request& req) {
          std::optional<std::string> batch;
          if (req.has_param("batch")) batch = req.get_param_value("batch");
          return svc.list_setups(batch);
        }));
  s.Post("/v1/setups", wrap([&svc](const httplib::Request& req) { return svc.generate_setups(body_of(req)); }, 201));
  s.Get(R"(/v1/setups/([^/]+))",
        wrap([&svc](const httplib::Request& req) { return svc.get_setup(req.matches[1]); }));

  s.Get("/v1/sessions", wrap([&svc](const httplib::Request&) { return svc.list_sessions(); }));
  s.Post("/v1/sessions", wrap([&svc](const httplib::Request& req) { return svc.create_session(body_of(req)); }, 201));
  s.Get(R"(/v1/sessions/([^/]+))",
        wrap([&svc](const httplib::Request& req) { return svc.get_session(req.matches[1]); }));
  s.Get(R"(/v1/sessions/([^/]+)/prompt)",
        wrap([&svc](const httplib::Request& req) { return svc.get_prompt(req.matches[1]); }));
  s.Post(R"(/v1/sessions/([^/]+)/actions)", wrap([&svc](const httplib::Request& req) {
           return svc.post_action(req.matches[1], body_of(req));
         }));
  s.Get(R"(/v1/sessions/([^/]+)/transcript)",
        wrap([&svc](const httplib::Request& req) { return svc.get_transcript(req.matches[1]); }));

  s.Get("/v1/runs", wrap([&svc](const httplib::Request&) { return svc.list_runs(); }));
  s.Post("/v1/runs", wrap([&svc](const httplib::Request& req) { return svc.start_run(body_of(req)); }, 202));
  s.Get(R"(/v1/runs/([^/]+))", wrap([&svc](const httplib::Request& req) { return svc.get_run(req.matches[1]); }));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& i = *impl_;
  if (i.options.port == 0) {
    i.port = i.server.bind_to_any_port(i.options.host);
  } else {
    i.port = i.server.bind_to_port(i.options.host, i.options.port) ? i.options.port : -1;
  }
  if (i.port < 0) throw IoError("cannot listen on " + i.options.host + ":" + std::to_string(i.options.port));
  return i.port;
}

void HttpServer::serve() {
  if (impl_->port < 0) throw IoError("serve() before bind()");
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace vericode
