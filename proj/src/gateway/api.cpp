#include "mm/gateway/api.hpp"

#include <cstdlib>

#include "httplib.h"
#include "mm/core/parser.hpp"
#include "mm/core/wire.hpp"

namespace mm {

using nlohmann::json;

namespace {

struct HttpError {
  int status;
  std::string message;
};

[[noreturn]] void fail(int status, std::string message) { throw HttpError{status, std::move(message)}; }

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) parts.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return parts;
}

json program_json(const Program& p) { return {{"ast", to_wire(p)}, {"text", serialize_program(p)}}; }

Program program_of(const json& v) {
  if (v.is_string()) return parse_program(v.get<std::string>());
  if (v.is_array()) return program_from_wire(v);
  fail(400, "'program' must be DSL text or a wire AST array");
}

double elapsed_of(const json& req) {
  if (!req.contains("elapsed")) return 0;
  if (!req["elapsed"].is_number() || req["elapsed"].get<double>() < 0)
    fail(400, "'elapsed' must be a non-negative number of seconds");
  return req["elapsed"].get<double>();
}

std::string key_of(const json& req) {
  if (!req.contains("idempotency_key")) return "";
  if (!req["idempotency_key"].is_string()) fail(400, "'idempotency_key' must be a string");
  return req["idempotency_key"].get<std::string>();
}

/// TaskState without the answer key of the open intervention.
json public_state(const TaskState& t) {
  json j = to_json(t);
  j["pending"] = t.pending.is_null() ? json(nullptr) : t.pending.at("kind");
  return j;
}

json execution_json(const AttemptOutcome& out) {
  json trace = json::array();
  for (const TraceEntry& e : out.execution.trace)
    trace.push_back({{"action", keyword(e.action)},
                     {"row", e.pose.cell.row},
                     {"col", e.pose.cell.col},
                     {"dir", keyword(e.pose.dir)}});
  json violations = json::array();
  for (const Violation& v : out.violations) violations.push_back(v.message);
  return {{"solved", out.solved},
          {"prompt_now", out.prompt_now},
          {"outcome", keyword(out.execution.outcome)},
          {"steps", out.execution.steps},
          {"trace", trace},
          {"violations", violations}};
}

json task_json(const TaskSpec& t, const Session& s) {
  json palette = json::array();
  for (BlockKind k : t.palette.kinds()) palette.push_back(keyword(k));
  json j = {{"id", t.id},
            {"phase", keyword(t.phase())},
            {"difficulty", keyword(t.difficulty)},
            {"concepts", t.concepts},
            {"block_limit", t.block_limit},
            {"palette", palette},
            {"grid", {{"rows", t.grid.to_rows()}, {"start_dir", keyword(t.grid.start().dir)}}},
            {"feedback_enabled", s.feedback_enabled()},
            {"state", public_state(s.task(t.id))}};
  j["novelty"] = t.novelty ? json(keyword(*t.novelty)) : json(nullptr);
  return j;
}

}  // namespace

Api::Api(const TaskCatalog& catalog, SessionStore& store) : catalog_(catalog), store_(store) {}

ApiResponse Api::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    json req = json::object();
    if (!body.empty()) {
      req = json::parse(body, nullptr, false);
      if (req.is_discarded() || !req.is_object()) fail(400, "request body must be a JSON object");
    }
    const auto parts = split_path(path);
    if (parts.empty() || parts[0] != "sessions") fail(404, "no such route");
    if (parts.size() == 1) {
      if (method != "POST") fail(405, "use POST /sessions");
      return create_session(req);
    }
    return route_session(method, parts, req);
  } catch (const HttpError& e) {
    return {e.status, {{"error", e.message}}};
  } catch (const ParseError& e) {
    return {400, {{"error", e.what()}, {"line", e.line()}, {"column", e.column()}}};
  } catch (const UnknownSession& e) {
    return {404, {{"error", e.what()}}};
  } catch (const FeedbackUnavailable& e) {
    return {409, {{"error", e.what()}}};
  } catch (const DuplicateRequest& e) {
    return {409, {{"error", e.what()}, {"duplicate", true}}};
  } catch (const SessionError& e) {
    return {409, {{"error", e.what()}}};
  } catch (const json::exception& e) {
    return {400, {{"error", e.what()}}};
  } catch (const Error& e) {
    return {400, {{"error", e.what()}}};
  } catch (const std::exception& e) {
    return {500, {{"error", e.what()}}};
  }
}

ApiResponse Api::create_session(const json& req) {
  if (!req.contains("group") || !req["group"].is_string()) fail(400, "'group' is required");
  auto group = group_from_keyword(req["group"].get<std::string>());
  if (!group) fail(400, "unknown group '" + req["group"].get<std::string>() + "'");
  Phase phase = Phase::Learning;
  if (req.contains("phase")) {
    auto p = req["phase"].is_string() ? phase_from_keyword(req["phase"].get<std::string>()) : std::nullopt;
    if (!p) fail(400, "'phase' must be \"learning\" or \"post_learning\"");
    phase = *p;
  }
  std::string pseudonym;
  if (req.contains("pseudonym")) {
    if (!req["pseudonym"].is_string() || req["pseudonym"].get<std::string>().empty())
      fail(400, "'pseudonym' must be a non-empty string");
    pseudonym = req["pseudonym"].get<std::string>();
  } else {
    pseudonym = "anonymous-" + std::to_string(++anonymous_);
  }
  const std::string token = store_.create(pseudonym, *group, phase);
  return store_.with_session(token, [&](Session& s) {
    return ApiResponse{201,
                       {{"token", token},
                        {"pseudonym", s.pseudonym()},
                        {"group", keyword(s.group())},
                        {"phase", keyword(s.phase())},
                        {"created_at", s.events().front().ts},
                        {"feedback_enabled", s.feedback_enabled()},
                        {"curriculum", s.curriculum()}}};
  });
}

ApiResponse Api::route_session(std::string_view method, const std::vector<std::string>& parts, const json& req) {
  const std::string& token = parts[1];
  return store_.with_session(token, [&](Session& s) -> ApiResponse {
    if (parts.size() == 3 && parts[2] == "metrics") {
      if (method != "GET") fail(405, "use GET");
      return {200, to_json(s.metrics())};
    }
    if (parts.size() < 3 || parts[2] != "tasks" || parts.size() > 5) fail(404, "no such route");
    if (parts.size() == 3) {
      if (method != "GET") fail(405, "use GET");
      json tasks = json::array();
      for (const std::string& id : s.curriculum()) {
        const TaskState& t = s.task(id);
        tasks.push_back({{"id", id},
                         {"difficulty", keyword(catalog_.at(id).difficulty)},
                         {"solved", t.solved},
                         {"attempts", t.attempts}});
      }
      return {200, {{"tasks", tasks}}};
    }
    const std::string& id = parts[3];
    const auto& cur = s.curriculum();
    if (std::find(cur.begin(), cur.end(), id) == cur.end()) fail(404, "task " + id + " is not in this session");
    const TaskSpec& spec = catalog_.at(id);
    if (parts.size() == 4) {
      if (method != "GET") fail(405, "use GET");
      return {200, task_json(spec, s)};
    }
    if (method != "POST") fail(405, "use POST");
    const std::string& action = parts[4];
    const double elapsed = elapsed_of(req);
    const std::string key = key_of(req);
    if (action == "attempts") {
      if (!req.contains("program")) fail(400, "'program' is required");
      AttemptOutcome out = s.record_attempt(id, program_of(req["program"]), elapsed, key);
      json j = execution_json(out);
      j["state"] = public_state(s.task(id));
      return {200, j};
    }
    if (action == "feedback") {
      const Program current = req.contains("program") ? program_of(req["program"]) : s.task(id).working_program;
      FeedbackPayload fb = s.request_feedback(id, current, elapsed, key);
      return {200, {{"kind", fb.kind}, {"body", fb.body}}};
    }
    if (action == "quiz-answers") {
      if (!req.contains("chosen") || !req["chosen"].is_number_unsigned()) fail(400, "'chosen' must be an option index");
      QuizVerdict v = s.answer_quiz(id, req["chosen"].get<std::size_t>(), elapsed, key);
      json j = {{"correct", v.correct}};
      j["feedback"] = v.correct ? json(nullptr) : json(v.feedback);
      return {200, j};
    }
    if (action == "adopt") {
      HintChoice choice = HintChoice::UseNewCode;
      if (req.contains("choice")) {
        const json& c = req["choice"];
        if (c == keyword(HintChoice::KeepMyCode))
          choice = HintChoice::KeepMyCode;
        else if (c != keyword(HintChoice::UseNewCode))
          fail(400, "'choice' must be \"use_new_code\" or \"keep_my_code\"");
      }
      if (choice == HintChoice::UseNewCode)
        s.adopt_recommendation(id, elapsed, key);
      else
        s.keep_own_code(id, elapsed, key);
      return {200, {{"choice", keyword(choice)}, {"working_program", program_json(s.task(id).working_program)}}};
    }
    fail(404, "no such route");
  });
}

void mount(httplib::Server& server, Api& api) {
  auto handler = [&api](const httplib::Request& req, httplib::Response& res) {
    ApiResponse r = api.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(R"(/.*)", handler);
  server.Post(R"(/.*)", handler);
  server.Put(R"(/.*)", handler);
  server.Delete(R"(/.*)", handler);
}

GatewayConfig GatewayConfig::from_env() {
  GatewayConfig c;
  c.data_dir = default_data_dir();
  c.catalog_dir = c.data_dir / "catalog";
  if (const char* p = std::getenv("MM_PORT")) {
    char* end = nullptr;
    const long v = std::strtol(p, &end, 10);
    if (*p == '\0' || *end != '\0' || v < 0 || v > 65535) throw Error(std::string("MM_PORT is not a port: ") + p);
    c.port = static_cast<int>(v);
  }
  if (const char* p = std::getenv("MM_CATALOG")) c.catalog_dir = p;
  if (const char* p = std::getenv("MM_LOG_DIR")) c.log_dir = std::filesystem::path(p);
  return c;
}

Gateway::Gateway(const GatewayConfig& config)
    : config_(config),
      catalog_(load_task_catalog(config.catalog_dir)),
      content_(FeedbackContent::load(config.data_dir)),
      store_(std::make_unique<SessionStore>(catalog_, content_->services(), config.log_dir)),
      api_(std::make_unique<Api>(catalog_, *store_)),
      server_(std::make_unique<httplib::Server>()) {
  check_catalog(catalog_.tasks());
  if (config.log_dir) {
    std::filesystem::create_directories(*config.log_dir);
    restored_ = store_->restore();
  }
  mount(*server_, *api_);
}

Gateway::~Gateway() { stop(); }

int Gateway::bind() {
  const int port = config_.port == 0 ? server_->bind_to_any_port(config_.host)
                                     : (server_->bind_to_port(config_.host, config_.port) ? config_.port : -1);
  if (port < 0) throw Error("cannot bind " + config_.host + ":" + std::to_string(config_.port) + " (port busy?)");
  return port;
}

void Gateway::listen() { server_->listen_after_bind(); }

void Gateway::stop() {
  if (server_) server_->stop();
}

}  // namespace mm
