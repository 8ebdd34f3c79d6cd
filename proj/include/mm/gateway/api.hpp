#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mm/session/content.hpp"
#include "mm/session/store.hpp"

namespace httplib {
class Server;
}

namespace mm {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// The HTTP routes as a plain function of (method, path, body), so that the
/// API can be exercised without a socket.
///
///   POST /sessions                              {group, phase?, pseudonym?} -> 201
///   GET  /sessions/{t}/tasks
///   GET  /sessions/{t}/tasks/{id}
///   POST /sessions/{t}/tasks/{id}/attempts      {program, elapsed?, idempotency_key?}
///   POST /sessions/{t}/tasks/{id}/feedback      {program?, elapsed?, idempotency_key?}
///   POST /sessions/{t}/tasks/{id}/quiz-answers  {chosen, elapsed?, idempotency_key?}
///   POST /sessions/{t}/tasks/{id}/adopt         {choice?, elapsed?, idempotency_key?}
///   GET  /sessions/{t}/metrics
///
/// `program` is DSL text or a wire AST array. Errors are {"error": message}
/// with 400 (bad request), 404 (unknown session, task or route), 405, or 409
/// (no feedback for the group/phase, duplicate idempotency key, nothing to
/// answer).
class Api {
 public:
  Api(const TaskCatalog& catalog, SessionStore& store);

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

 private:
  ApiResponse create_session(const nlohmann::json& req);
  ApiResponse route_session(std::string_view method, const std::vector<std::string>& parts, const nlohmann::json& req);

  const TaskCatalog& catalog_;
  SessionStore& store_;
  std::atomic<int> anonymous_{0};
};

/// Routes every request of `server` to `api`.
void mount(httplib::Server& server, Api& api);

struct GatewayConfig {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::filesystem::path catalog_dir;
  std::filesystem::path data_dir;
  std::optional<std::filesystem::path> log_dir;

  /// MM_PORT, MM_CATALOG (catalog directory) and MM_LOG_DIR over the bundled defaults.
  static GatewayConfig from_env();
};

/// Owns the catalog, quiz content, store and HTTP server. Logged sessions are
/// restored on construction.
class Gateway {
 public:
  explicit Gateway(const GatewayConfig& config);
  ~Gateway();

  std::size_t restored() const { return restored_; }
  /// Binds the configured port (0 picks a free one) and returns it. Throws when the port is busy.
  int bind();
  /// Serves until stop().
  void listen();
  void stop();

 private:
  GatewayConfig config_;
  TaskCatalog catalog_;
  std::unique_ptr<FeedbackContent> content_;
  std::unique_ptr<SessionStore> store_;
  std::unique_ptr<Api> api_;
  std::unique_ptr<httplib::Server> server_;
  std::size_t restored_ = 0;
};

}  // namespace mm
