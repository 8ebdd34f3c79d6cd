#include <filesystem>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "mm/gateway/api.hpp"

using namespace mm;
using nlohmann::json;

namespace {

const std::filesystem::path kData(MM_TEST_DATA_DIR);

const TaskCatalog& catalog() {
  static const TaskCatalog c = load_task_catalog(kData / "catalog");
  return c;
}

FeedbackServices services() {
  static auto content = FeedbackContent::load(kData);
  return content->services();
}

struct Fixture {
  SessionStore store{catalog(), services()};
  Api api{catalog(), store};

  ApiResponse post(const std::string& path, const json& body) { return api.handle("POST", path, body.dump()); }
  ApiResponse get(const std::string& path) { return api.handle("GET", path, ""); }

  std::string open(const std::string& group, const std::string& phase = "learning") {
    auto r = post("/sessions", {{"group", group}, {"phase", phase}});
    REQUIRE(r.status == 201);
    return r.body["token"].get<std::string>();
  }
};

}  // namespace

TEST_CASE("session creation") {
  Fixture f;
  auto r = f.post("/sessions", {{"group", "PlanQuiz"}, {"phase", "learning"}});
  CHECK(r.status == 201);
  CHECK(r.body["curriculum"] == json({"T01", "T02", "T03", "T04", "T05", "T06", "T07", "T08", "T09", "T10", "T11", "T12"}));
  CHECK(r.body["token"].get<std::string>().size() == 32);
  CHECK(r.body["group"] == "PlanQuiz");
  CHECK(r.body["created_at"].get<std::string>().ends_with("Z"));
  CHECK(f.post("/sessions", {{"group", "CodeRec"}, {"phase", "post_learning"}}).body["curriculum"].size() == 15);
  CHECK(f.post("/sessions", {{"group", "Nobody"}}).status == 400);
  CHECK(f.post("/sessions", {{"group", "None"}, {"phase", "later"}}).status == 400);
  CHECK(f.api.handle("POST", "/sessions", "{not json").status == 400);
  CHECK(f.get("/sessions").status == 405);
  CHECK(f.post("/sessions", {{"group", "None"}, {"pseudonym", "kid7"}}).status == 201);
  CHECK(f.post("/sessions", {{"group", "None"}, {"pseudonym", "kid7"}}).status == 409);
}

TEST_CASE("attempts and task views") {
  Fixture f;
  const std::string t = f.open("CodeRec");
  auto r = f.post("/sessions/" + t + "/tasks/T03/attempts", {{"program", "move"}, {"elapsed", 4}});
  CHECK(r.status == 200);
  CHECK(r.body["solved"] == false);
  CHECK(r.body["prompt_now"] == false);
  CHECK(r.body.contains("trace"));

  const auto& sol = catalog().at("T03").solution;
  r = f.post("/sessions/" + t + "/tasks/T03/attempts", {{"program", serialize_program(sol)}});
  CHECK(r.body["solved"] == true);
  CHECK(r.body["outcome"] == "success");
  // the same program as a wire AST
  r = f.post("/sessions/" + t + "/tasks/T01/attempts", {{"program", json::parse(R"([{"kind":"move"}])")}});
  CHECK(r.status == 200);

  r = f.get("/sessions/" + t + "/tasks");
  CHECK(r.body["tasks"].size() == 12);
  CHECK(r.body["tasks"][2]["solved"] == true);
  r = f.get("/sessions/" + t + "/tasks/T03");
  CHECK(r.body["grid"]["rows"].is_array());
  CHECK(r.body["state"]["attempts"] == 2);
  CHECK_FALSE(r.body.contains("solution"));

  CHECK(f.get("/sessions/" + t + "/tasks/P01").status == 404);
  CHECK(f.get("/sessions/nope/tasks").status == 404);
  CHECK(f.get("/elsewhere").status == 404);
  auto bad = f.post("/sessions/" + t + "/tasks/T03/attempts", {{"program", "move {"}});
  CHECK(bad.status == 400);
  CHECK(bad.body["line"] == 1);
  CHECK(f.post("/sessions/" + t + "/tasks/T03/attempts", {{"program", "move"}, {"elapsed", -1}}).status == 400);
}

TEST_CASE("prompt after three failures and Code-Rec round") {
  Fixture f;
  const std::string t = f.open("CodeRec");
  const std::string base = "/sessions/" + t + "/tasks/T05/";
  bool prompt = false;
  for (int i = 0; i < 3; ++i) prompt = f.post(base + "attempts", {{"program", "move"}, {"elapsed", 10}}).body["prompt_now"];
  CHECK(prompt);
  auto fb = f.post(base + "feedback", json::object());
  REQUIRE(fb.status == 200);
  CHECK(fb.body["kind"] == "code_rec");
  CHECK(fb.body["body"]["recommended"]["ast"].is_array());
  auto view = f.get("/sessions/" + t + "/tasks/T05");
  CHECK(view.body["state"]["pending"] == "code_rec");
  auto ad = f.post(base + "adopt", {{"choice", "use_new_code"}, {"elapsed", 3}});
  CHECK(ad.status == 200);
  CHECK(ad.body["working_program"]["text"] == fb.body["body"]["recommended"]["text"]);
  CHECK(f.post(base + "adopt", json::object()).status == 409);
  auto m = f.get("/sessions/" + t + "/metrics");
  CHECK(m.status == 200);
  CHECK(m.body["time_on_intervention"] == 3.0);
}

TEST_CASE("None group and post-learning phase get 409 on feedback") {
  Fixture f;
  const std::string t = f.open("None");
  auto r = f.post("/sessions/" + t + "/tasks/T03/feedback", {{"program", "move"}});
  CHECK(r.status == 409);
  const std::string p = f.open("PlanQuiz", "post_learning");
  CHECK(f.post("/sessions/" + p + "/tasks/P03/feedback", json::object()).status == 409);
}

TEST_CASE("quiz answers hide the key until graded") {
  Fixture f;
  const std::string t = f.open("PlanQuiz");
  const std::string base = "/sessions/" + t + "/tasks/T08/";
  auto fb = f.post(base + "feedback", {{"program", "move"}});
  REQUIRE(fb.status == 200);
  CHECK(fb.body["kind"] == "plan_quiz");
  CHECK(fb.body["body"]["stage"] == "planning");
  CHECK_FALSE(fb.body["body"].contains("correct"));
  CHECK_FALSE(fb.body["body"].dump().find("correct_index") != std::string::npos);
  CHECK(f.get("/sessions/" + t + "/tasks/T08").body["state"]["pending"] == "plan_quiz");
  const auto& q = services().plan_quizzes->get("T08", PlanStage::Planning);
  const std::size_t wrong = (q.correct_index + 1) % q.options.size();
  auto a = f.post(base + "quiz-answers", {{"chosen", wrong}, {"elapsed", 5}});
  CHECK(a.body["correct"] == false);
  CHECK(a.body["feedback"].is_string());
  a = f.post(base + "quiz-answers", {{"chosen", q.correct_index}, {"elapsed", 5}});
  CHECK(a.body["correct"] == true);
  CHECK(f.post(base + "quiz-answers", {{"chosen", 0}}).status == 409);
  CHECK(f.post(base + "quiz-answers", {{"chosen", -1}}).status == 400);
}

TEST_CASE("idempotency keys") {
  Fixture f;
  const std::string t = f.open("CodeQuiz");
  const std::string url = "/sessions/" + t + "/tasks/T01/attempts";
  CHECK(f.post(url, {{"program", "move"}, {"idempotency_key", "a1"}}).status == 200);
  auto dup = f.post(url, {{"program", "move"}, {"idempotency_key", "a1"}});
  CHECK(dup.status == 409);
  CHECK(dup.body["duplicate"] == true);
  CHECK(f.get("/sessions/" + t + "/tasks/T01").body["state"]["attempts"] == 1);
}

TEST_CASE("restart restores sessions from the log directory") {
  auto dir = std::filesystem::temp_directory_path() / "mm_gateway_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::string token, before;
  {
    SessionStore store(catalog(), services(), dir);
    Api api(catalog(), store);
    token = json::parse(api.handle("POST", "/sessions", R"({"group":"CodeRec"})").body.dump())["token"];
    for (int i = 0; i < 3; ++i) api.handle("POST", "/sessions/" + token + "/tasks/T07/attempts", R"({"program":"move"})");
    api.handle("POST", "/sessions/" + token + "/tasks/T07/feedback", "{}");
    api.handle("POST", "/sessions/" + token + "/tasks/T07/adopt", R"({"choice":"keep_my_code","elapsed":2})");
    before = api.handle("GET", "/sessions/" + token + "/tasks/T07", "").body.dump();
  }
  SessionStore store(catalog(), services(), dir);
  CHECK(store.restore() == 1);
  Api api(catalog(), store);
  CHECK(api.handle("GET", "/sessions/" + token + "/tasks/T07", "").body.dump() == before);
  CHECK(api.handle("POST", "/sessions/" + token + "/tasks/T07/attempts", R"({"program":"move"})").status == 200);
  std::filesystem::remove_all(dir);
}

TEST_CASE("served over HTTP") {
  auto dir = std::filesystem::temp_directory_path() / "mm_gateway_http";
  std::filesystem::remove_all(dir);
  GatewayConfig config;
  config.host = "127.0.0.1";
  config.port = 0;
  config.data_dir = kData;
  config.catalog_dir = kData / "catalog";
  config.log_dir = dir;
  Gateway gw(config);
  const int port = gw.bind();
  std::thread server([&] { gw.listen(); });
  httplib::Client cli("127.0.0.1", port);
  auto r = cli.Post("/sessions", R"({"group":"None","phase":"learning"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 201);
  const std::string token = json::parse(r->body)["token"];
  r = cli.Post("/sessions/" + token + "/tasks/T03/attempts", R"({"program":"move"})", "application/json");
  REQUIRE(r);
  CHECK(json::parse(r->body)["solved"] == false);
  r = cli.Post("/sessions/" + token + "/tasks/T03/feedback", "{}", "application/json");
  REQUIRE(r);
  CHECK(r->status == 409);
  r = cli.Get("/sessions/" + token + "/metrics");
  REQUIRE(r);
  CHECK(json::parse(r->body)["max_score"] == 12);
  gw.stop();
  server.join();
  CHECK(std::filesystem::exists(dir / (token + ".jsonl")));

  GatewayConfig again = config;
  Gateway restarted(again);
  CHECK(restarted.restored() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("environment configuration") {
  setenv("MM_PORT", "9123", 1);
  setenv("MM_LOG_DIR", "/tmp/mm-logs", 1);
  auto c = GatewayConfig::from_env();
  CHECK(c.port == 9123);
  CHECK(c.log_dir == std::filesystem::path("/tmp/mm-logs"));
  setenv("MM_PORT", "http", 1);
  CHECK_THROWS_AS(GatewayConfig::from_env(), Error);
  unsetenv("MM_PORT");
  unsetenv("MM_LOG_DIR");
}
