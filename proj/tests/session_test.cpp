#include <random>

#include "doctest.h"
#include "mm/core/parser.hpp"
#include "mm/session/store.hpp"
#include "support/session_fuzz.hpp"

using namespace mm;

namespace {

const std::filesystem::path kData(MM_TEST_DATA_DIR);

const TaskCatalog& catalog() {
  static const TaskCatalog c = load_task_catalog(kData / "catalog");
  return c;
}

struct Services {
  CodeQuizBuilder quizzes{FeedbackTemplates::load(kData / "quizzes" / "code_quiz_feedback.json")};
  PlanQuizBank plans = PlanQuizBank::load(kData / "quizzes");
  FeedbackServices get() { return {&quizzes, &plans, {}}; }
};

Services& services() {
  static Services s;
  return s;
}

Session make(Group g, Phase ph = Phase::Learning) {
  ManualClock clock(std::chrono::sys_days{std::chrono::year{2025} / 1 / 15});
  return Session("s1", "student-1", g, ph, catalog(), services().get(), clock.clock());
}

Program P(const char* text) { return parse_program(text); }

}  // namespace

TEST_CASE("sessions cover the phase curriculum") {
  Session s = make(Group::CodeRec);
  CHECK(s.curriculum().size() == 12);
  CHECK(s.feedback_enabled());
  Session post = make(Group::PlanQuiz, Phase::PostLearning);
  CHECK(post.curriculum().size() == 15);
  CHECK_FALSE(post.feedback_enabled());
  CHECK_THROWS_AS(post.request_feedback("P01", Program()), FeedbackUnavailable);
  CHECK(s.events().front().kind == EventKind::PhaseStart);
}

TEST_CASE("the prompt fires on the third consecutive failure only") {
  Session s = make(Group::CodeQuiz);
  const Program bad = P("turn_left");
  CHECK_FALSE(s.record_attempt("T03", bad, 10).prompt_now);
  CHECK_FALSE(s.record_attempt("T03", bad, 10).prompt_now);
  CHECK(s.record_attempt("T03", bad, 10).prompt_now);
  CHECK(s.task("T03").prompt_shown);
  CHECK_FALSE(s.record_attempt("T03", bad, 10).prompt_now);
  // Feedback does not reset the counter; success does.
  s.request_feedback("T03", bad);
  CHECK(s.task("T03").consecutive_failures == 4);
  auto ok = s.record_attempt("T03", catalog().at("T03").solution, 20);
  CHECK(ok.solved);
  CHECK(s.task("T03").consecutive_failures == 0);
  CHECK(s.task("T03").solved);
  CHECK(s.task("T03").time_on_task == doctest::Approx(60));

  Session none = make(Group::None);
  for (int i = 0; i < 3; ++i) CHECK_FALSE(none.record_attempt("T03", bad, 1).prompt_now);
  CHECK_FALSE(none.task("T03").prompt_shown);
  CHECK_THROWS_AS(none.request_feedback("T03", bad), FeedbackUnavailable);
}

TEST_CASE("attempts are validated against the task") {
  Session s = make(Group::None);
  auto out = s.record_attempt("T01", P("repeat 2 { move } turn_left move move"), 5);
  CHECK_FALSE(out.solved);
  CHECK(out.violations.size() == 1);
  CHECK_THROWS_AS(s.record_attempt("P01", Program(), 1), SessionError);
}

TEST_CASE("solved is set once") {
  Session s = make(Group::None);
  const Program sol = catalog().at("T02").solution;
  s.record_attempt("T02", sol, 5);
  s.record_attempt("T02", sol, 5);
  int solved_events = 0;
  for (const auto& e : s.events()) solved_events += e.kind == EventKind::TaskSolved;
  CHECK(solved_events == 1);
}

TEST_CASE("Code-Rec feedback and adoption") {
  Session s = make(Group::CodeRec);
  const TaskSpec& t = catalog().at("T06");
  auto fb = s.request_feedback("T06", t.solution, 3);
  CHECK(fb.kind == "code_rec");
  CHECK(fb.body["recommended"]["text"] == serialize_program(t.solution));
  CHECK(fb.body["actions"].size() == 2);

  fb = s.request_feedback("T06", P("move"), 3);
  CHECK(s.adopt_recommendation("T06", 4) == parse_program(fb.body["recommended"]["text"].get<std::string>()));
  CHECK(s.task("T06").time_on_intervention == doctest::Approx(4));
  CHECK_THROWS_AS(s.adopt_recommendation("T06", 1), SessionError);
  s.request_feedback("T06", P("move"), 3);
  s.keep_own_code("T06", 2);
  CHECK(s.task("T06").working_program == P("move"));
  CHECK(s.task("T06").feedback_requests == 3);
  CHECK_THROWS_AS(s.answer_quiz("T06", 0, 1), SessionError);
}

TEST_CASE("Plan-Quiz delivery and answers") {
  Session s = make(Group::PlanQuiz);
  auto first = s.request_feedback("T05", Program(), 1);
  CHECK(first.kind == "plan_quiz");
  CHECK(first.body["stage"] == "planning");
  CHECK_FALSE(first.body.contains("correct"));
  const PlanQuiz& q = services().plans.get("T05", PlanStage::Planning);
  auto wrong = s.answer_quiz("T05", (q.correct_index + 1) % 4, 6);
  CHECK_FALSE(wrong.correct);
  CHECK(wrong.feedback == q.feedback[(q.correct_index + 1) % 4]);
  CHECK(s.answer_quiz("T05", q.correct_index, 4).correct);
  CHECK(s.task("T05").time_on_intervention == doctest::Approx(10));
  CHECK_THROWS_AS(s.answer_quiz("T05", 0, 1), SessionError);
  CHECK(s.request_feedback("T05", Program(), 1).body["stage"] == "solution_finding");
  CHECK(s.request_feedback("T05", Program(), 1).body["stage"] == "solution_finding");
}

TEST_CASE("Code-Quiz feedback is a quiz or a degraded recommendation") {
  Session s = make(Group::CodeQuiz);
  auto fb = s.request_feedback("T10", catalog().at("T10").solution, 1);
  REQUIRE(fb.kind == "code_quiz");
  CHECK(fb.body["options"].size() == 3);
  const auto key = s.task("T10").pending["answer_key"];
  CHECK(s.answer_quiz("T10", key["correct_index"].get<std::size_t>(), 5).correct);
  // A recommendation ending on a turn has no discriminating grid.
  auto degraded = s.request_feedback("T01", P("move move"), 1);
  CHECK(degraded.kind == "code_rec");
  CHECK(degraded.body["degraded_from"] == "code_quiz");
}

TEST_CASE("idempotency keys are rejected on reuse") {
  Session s = make(Group::CodeRec);
  s.record_attempt("T01", Program(), 1, "a1");
  const auto before = s.events().size();
  CHECK_THROWS_AS(s.record_attempt("T01", Program(), 1, "a1"), DuplicateRequest);
  CHECK_THROWS_AS(s.request_feedback("T01", Program(), 1, "a1"), DuplicateRequest);
  CHECK(s.events().size() == before);
  Session r = Session::replay(s.events(), catalog());
  CHECK_THROWS_AS(r.record_attempt("T01", Program(), 1, "a1"), DuplicateRequest);
}

TEST_CASE("phase end closes the session") {
  Session s = make(Group::None);
  s.end_phase();
  CHECK(s.ended());
  CHECK_THROWS_AS(s.record_attempt("T01", Program(), 1), SessionError);
}

TEST_CASE("metrics") {
  Session s = make(Group::CodeRec);
  SessionMetrics m = s.metrics();
  CHECK(m.score == 0);
  CHECK(m.intervention_rate == 0);
  CHECK(m.max_score == 12);
  for (const std::string& id : s.curriculum()) s.record_attempt(id, catalog().at(id).solution, 30);
  for (int i = 0; i < 11; ++i) s.request_feedback(s.curriculum()[static_cast<std::size_t>(i)], Program(), 0);
  m = s.metrics();
  CHECK(m.score == 12);
  CHECK(m.mean_time_per_task == doctest::Approx(30));
  CHECK(m.intervention_rate == doctest::Approx(11.0 / 12.0));
  CHECK(to_json(m)["tasks"].size() == 12);
}

TEST_CASE("event timestamps are ISO-8601 and non-decreasing") {
  ManualClock clock(std::chrono::sys_days{std::chrono::year{2025} / 3 / 1});
  Session s("s2", "p", Group::CodeRec, Phase::Learning, catalog(), services().get(), clock.clock());
  clock.advance(61.5);
  s.record_attempt("T01", Program(), 61.5);
  CHECK(s.events()[0].ts == "2025-03-01T00:00:00.000Z");
  CHECK(s.events()[1].ts == "2025-03-01T00:01:01.500Z");
  for (std::size_t i = 1; i < s.events().size(); ++i) CHECK(s.events()[i - 1].ts <= s.events()[i].ts);
}

TEST_CASE("replay reconstructs the live state") {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 40; ++n) {
    Group g = kAllGroups[n % 4];
    Session s = make(g, n % 5 == 4 ? Phase::PostLearning : Phase::Learning);
    testing::fuzz_session(s, catalog(), rng, 60);
    Session r = Session::replay(s.events(), catalog());
    CHECK(r.state_fingerprint() == s.state_fingerprint());
    if (g == Group::None) {
      for (const auto& e : s.events()) CHECK(e.kind != EventKind::FeedbackRequest);
    }
    for (const auto& [id, t] : s.tasks()) {
      if (t.prompt_shown) CHECK(g != Group::None);
    }
  }
}

TEST_CASE("store persists logs and restores sessions") {
  const auto dir = std::filesystem::temp_directory_path() / "mm_store_test";
  std::filesystem::remove_all(dir);
  std::string token;
  std::string fingerprint;
  {
    SessionStore store(catalog(), services().get(), dir);
    token = store.create("kid-7", Group::PlanQuiz, Phase::Learning);
    CHECK_THROWS_AS(store.create("kid-7", Group::None, Phase::Learning), SessionError);
    store.create("kid-7", Group::None, Phase::PostLearning);
    store.with_session(token, [](Session& s) {
      s.record_attempt("T01", Program(), 4);
      s.request_feedback("T01", Program(), 2);
      s.answer_quiz("T01", 0, 3);
    });
    fingerprint = store.with_session(token, [](Session& s) { return s.state_fingerprint(); });
    CHECK_THROWS_AS(store.with_session("nope", [](Session&) { return 0; }), SessionError);
  }
  SessionStore again(catalog(), services().get(), dir);
  CHECK(again.restore() == 2);
  CHECK(again.with_session(token, [](Session& s) { return s.state_fingerprint(); }) == fingerprint);
  again.with_session(token, [](Session& s) { s.record_attempt("T02", Program(), 1); });
  CHECK(read_event_log(dir / (token + ".jsonl")).back().kind == EventKind::Attempt);
  std::filesystem::remove_all(dir);
}
