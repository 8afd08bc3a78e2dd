#pragma once

#include <memory>
#include <string>

#include "vericode/service/session_service.hpp"

namespace vericode {

struct HttpOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  /// When set, every request except GET /v1/health needs
  /// "Authorization: Bearer <token>".
  std::string token;
};

/// JSON over HTTP for a SessionService. Routes (all under /v1):
///
///   GET  /health
///   GET  /setups[?batch=<id>]      POST /setups        GET /setups/<id>
///   GET  /sessions                 POST /sessions      GET /sessions/<id>
///   GET  /sessions/<id>/prompt     POST /sessions/<id>/actions
///   GET  /sessions/<id>/transcript
///   GET  /runs                     POST /runs          GET /runs/<id>
///
/// Errors are {"error": {"code", "message"}} with status 400 (bad request),
/// 401, 404, 409 (busy, stale seq or finished session) or 500.
class HttpServer {
 public:
  HttpServer(SessionService& service, HttpOptions options);
  ~HttpServer();

  /// Binds the socket; returns the bound port. Throws IoError.
  int bind();
  /// Serves until stop(); call bind() first.
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vericode
