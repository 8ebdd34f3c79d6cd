#include <random>

#include "doctest.h"
#include "mm/core/catalog.hpp"
#include "mm/core/parser.hpp"
#include "mm/quiz/quiz.hpp"
#include "mm/tree/neighborhood.hpp"
#include "support/blank_oracle.hpp"
#include "support/generators.hpp"

using namespace mm;

namespace {

const std::filesystem::path kData(MM_TEST_DATA_DIR);

const TaskCatalog& catalog() {
  static const TaskCatalog c = load_task_catalog(kData / "catalog");
  return c;
}

const FeedbackTemplates& templates() {
  static const FeedbackTemplates t = FeedbackTemplates::load(kData / "quizzes" / "code_quiz_feedback.json");
  return t;
}

const PlanQuizBank& bank() {
  static const PlanQuizBank b = PlanQuizBank::load(kData / "quizzes");
  return b;
}

Program P(const char* text) { return parse_program(text); }

int succeeding_fills(const BlankedProgram& b, const TaskGrid& g) {
  int n = 0;
  for (Action a : kAllActions) n += execute(b.fill(a), g).success();
  return n;
}

}  // namespace

TEST_CASE("place_blank picks the deepest, then rightmost, basic action") {
  auto b = place_blank(P("repeat_until_goal { if_else path_ahead { move } else { turn_left } }"));
  CHECK(b.correct_action == Action::TurnLeft);
  CHECK(b.render() ==
        "repeat_until_goal {\n  if_else path_ahead {\n    move\n  } else {\n    ___\n  }\n}\n");
  b = place_blank(P("move"));
  CHECK(b.correct_action == Action::Move);
  CHECK(b.render() == "___\n");
  b = place_blank(P("move repeat 4 { turn_left }"));
  CHECK(b.correct_action == Action::TurnLeft);
  CHECK(b.blank_path.size() == 2);
  b = place_blank(P("repeat 2 { move turn_right } turn_left"));
  CHECK(b.correct_action == Action::TurnRight);
  CHECK_THROWS_AS(place_blank(P("repeat_until_goal { }")), Error);
  CHECK_THROWS_AS(place_blank(Program()), Error);
}

TEST_CASE("blanked program wire form and fills") {
  auto b = place_blank(P("repeat 3 { move turn_left }"));
  CHECK(b.to_wire().dump() == R"([{"body":[{"kind":"move"},{"kind":"hole"}],"count":3,"kind":"repeat"}])");
  CHECK(b.fill(b.correct_action) == b.source);
  CHECK(b.fill(Action::Move) == P("repeat 3 { move move }"));
}

TEST_CASE("place_blank agrees with a full leaf scan") {
  testing::ProgramGenerator gen(41, 4, 20);
  for (int i = 0; i < 1000; ++i) {
    Program p = gen.next();
    auto want = testing::deepest_rightmost_leaf(p);
    if (!want) {
      CHECK_THROWS_AS(place_blank(p), Error);
      continue;
    }
    auto got = place_blank(p);
    CHECK(block_at(p, got.blank_path).kind == block_at(p, want->path).kind);
    CHECK(got.blank_path.size() == want->path.size());
    for (std::size_t k = 0; k < want->path.size(); ++k) {
      CHECK(got.blank_path[k].index == want->path[k].index);
      if (k + 1 < want->path.size()) CHECK(got.blank_path[k].branch == want->path[k].branch);
    }
  }
}

TEST_CASE("grid synthesis: forced and simple cases") {
  auto grids = synthesize_quiz_grids(place_blank(P("move")));
  REQUIRE_FALSE(grids.empty());
  CHECK(grids[0].to_rows() == std::vector<std::string>{"SG"});

  auto corridor = synthesize_quiz_grids(place_blank(P("repeat_until_goal { move }")));
  REQUIRE_FALSE(corridor.empty());
  for (const auto& g : corridor) CHECK(is_discriminating(place_blank(P("repeat_until_goal { move }")), g));
  CHECK(corridor[0].height() == 1);
  CHECK(corridor[0].width() >= 2);
}

TEST_CASE("grid synthesis: every grid is discriminating and ranked") {
  for (const TaskSpec* t : catalog().curriculum(Phase::Learning)) {
    CAPTURE(t->id);
    auto b = place_blank(t->solution);
    auto grids = synthesize_quiz_grids(b);
    REQUIRE_FALSE(grids.empty());
    for (std::size_t i = 0; i < grids.size(); ++i) {
      CHECK(succeeding_fills(b, grids[i]) == 1);
      CHECK(execute(b.fill(b.correct_action), grids[i]).success());
      CHECK(grids[i].width() <= 8);
      CHECK(grids[i].height() <= 8);
      if (i > 0) CHECK(grids[i - 1].free_cell_count() <= grids[i].free_cell_count());
    }
  }
}

TEST_CASE("grid synthesis fails when no fill can matter") {
  // The blank sits in a branch that can never run, so all fills behave the same.
  auto b = place_blank(P("if path_ahead { if_else path_ahead { move } else { turn_left } }"));
  CHECK(b.correct_action == Action::TurnLeft);
  CHECK_THROWS_AS(synthesize_quiz_grids(b), GridSynthesisError);
}

TEST_CASE("build_code_quiz on a solved attempt") {
  const TaskSpec& t01 = catalog().at("T01");
  CodeQuiz q = build_code_quiz(t01.solution, t01.solution, t01, templates());
  CHECK(q.recommended == t01.solution);
  CHECK(q.blanked.fill(q.blanked.correct_action) == t01.solution);
  CHECK(succeeding_fills(q.blanked, q.grid) == 1);
  CHECK(q.feedback.size() == 2);
  for (Action a : q.options)
    if (a != q.blanked.correct_action) CHECK_FALSE(q.feedback.at(a).empty());
  CHECK(q.task_grid_fallback == (q.grid == t01.grid));
}

TEST_CASE("Code-Quiz grading") {
  const TaskSpec& t10 = catalog().at("T10");
  CodeQuizBuilder builder(templates());
  CodeQuiz q = builder.build(t10.solution, t10);
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = grade_quiz_answer(q, i);
    CHECK(v.correct == (q.options[i] == q.blanked.correct_action));
    CHECK(v.feedback.empty() == v.correct);
    if (!v.correct) CHECK(v.feedback == templates().text(q.options[i], q.blanked.correct_action));
  }
  CHECK_THROWS_AS(grade_quiz_answer(q, 3), Error);
  auto j = to_json(q);
  CHECK(j["options"].size() == 3);
  CHECK(j["template"]["text"].get<std::string>().find("___") != std::string::npos);
  CHECK_FALSE(j.contains("feedback"));
}

TEST_CASE("Code-Quiz builder caches and honours the grid index") {
  const TaskSpec& t06 = catalog().at("T06");
  CodeQuizBuilder builder(templates());
  CodeQuiz a = builder.build(P("move"), t06);
  CodeQuiz b = builder.build(P("move"), t06);
  CHECK(a.grid == b.grid);
  CHECK(a.blanked.render() == b.blanked.render());
  CodeQuiz c = builder.build(P("move"), t06, 1);
  CHECK(c.grid_index == 1);
  CHECK_FALSE(c.grid == a.grid);
  CHECK_THROWS_AS(builder.build(P("move"), t06, 100000), Error);
}

TEST_CASE("quiz_source extends a recommendation without actions") {
  const Program star = P("repeat_until_goal { if_else path_ahead { move } else { turn_left } }");
  CHECK(quiz_source(P("repeat_until_goal { }"), star) == P("repeat_until_goal { if_else path_ahead { move } else { } }"));
  CHECK(quiz_source(P("repeat_until_goal { if_else path_ahead { move } else { } }"), star) ==
        P("repeat_until_goal { if_else path_ahead { move } else { } }"));
  CHECK(has_basic_action(quiz_source(Program(), star)));
}

TEST_CASE("Code-Quiz on corrupted attempts is discriminating or unavailable") {
  std::mt19937_64 rng(5);
  CodeQuizBuilder builder(templates());
  int built = 0, unavailable = 0;
  for (const TaskSpec* t : catalog().curriculum(Phase::Learning)) {
    for (int i = 0; i < 5; ++i) {
      Program stu = corrupt(t->solution, t->palette, 1 + static_cast<int>(rng() % 3), rng);
      try {
        CodeQuiz q = builder.build(stu, *t);
        CHECK(succeeding_fills(q.blanked, q.grid) == 1);
        ++built;
      } catch (const QuizUnavailable&) {
        ++unavailable;
      }
    }
  }
  CHECK(built > unavailable);
}

TEST_CASE("Plan-Quiz content is complete") {
  CHECK(bank().size() == 24);
  for (const TaskSpec* t : catalog().curriculum(Phase::Learning)) {
    for (PlanStage s : {PlanStage::Planning, PlanStage::SolutionFinding}) {
      const PlanQuiz& q = bank().get(t->id, s);
      CAPTURE(t->id);
      CHECK(q.options.size() == 4);
      CHECK(q.correct_index < 4);
      for (std::size_t i = 0; i < 4; ++i) CHECK(q.feedback[i].empty() == (i == q.correct_index));
    }
  }
}

TEST_CASE("solution-finding quizzes have exactly one working program") {
  for (const TaskSpec* t : catalog().curriculum(Phase::Learning)) {
    const PlanQuiz& q = bank().get(t->id, PlanStage::SolutionFinding);
    for (std::size_t i = 0; i < 4; ++i) {
      CAPTURE(t->id);
      CAPTURE(i);
      Program p = parse_program(q.options[i]);
      CHECK(execute(p, t->grid).success() == (i == q.correct_index));
    }
    CHECK(parse_program(q.options[q.correct_index]) == t->solution);
  }
}

TEST_CASE("plan_quiz_for stages") {
  const TaskSpec& t10 = catalog().at("T10");
  CHECK(plan_quiz_for(bank(), t10, 1).stage == PlanStage::Planning);
  CHECK(plan_quiz_for(bank(), t10, 2).stage == PlanStage::SolutionFinding);
  CHECK(plan_quiz_for(bank(), t10, 7).stage == PlanStage::SolutionFinding);
  CHECK_THROWS_AS(plan_quiz_for(bank(), catalog().at("P12"), 1), Error);
  const PlanQuiz& q = plan_quiz_for(bank(), t10, 1);
  CHECK(grade_quiz_answer(q, q.correct_index).correct);
  auto wrong = grade_quiz_answer(q, (q.correct_index + 1) % 4);
  CHECK_FALSE(wrong.correct);
  CHECK(wrong.feedback == q.feedback[(q.correct_index + 1) % 4]);
  CHECK_THROWS_AS(grade_quiz_answer(q, 4), Error);
}
