#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mm/core/catalog.hpp"
#include "mm/core/interpreter.hpp"
#include "mm/core/parser.hpp"
#include "mm/core/wire.hpp"
#include "support/generators.hpp"

using namespace mm;

namespace {

const TaskCatalog& catalog() {
  static const TaskCatalog c = load_task_catalog(std::filesystem::path(MM_TEST_DATA_DIR) / "catalog");
  return c;
}

TaskGrid corridor(std::vector<std::string> rows, Direction d = Direction::East) {
  return TaskGrid::from_rows(rows, d);
}

}  // namespace

TEST_CASE("parse_program builds the AST") {
  CHECK(parse_program("repeat 4 { move }") == Program({Block::repeat(4, {Block::move()})}));
  CHECK(parse_program("move\nmove") == Program({Block::move(), Block::move()}));
  CHECK(parse_program("move; turn_left;turn_right") ==
        Program({Block::move(), Block::turn_left(), Block::turn_right()}));
  CHECK(parse_program("move move").node_count() == 2);
  CHECK(parse_program("").empty());
  CHECK(parse_program("if_else path_left { } else { turn_right }") ==
        Program({Block::if_else(Condition::PathLeft, {}, {Block::turn_right()})}));
}

TEST_CASE("parse_program reports syntax errors with a position") {
  try {
    parse_program("repeat 4 { move");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 10);
    CHECK(std::string(e.what()).find("unbalanced") != std::string::npos);
  }
  try {
    parse_program("move\n  jump");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(parse_program("repeat { move }"), ParseError);
  CHECK_THROWS_AS(parse_program("if path_up { move }"), ParseError);
  CHECK_THROWS_AS(parse_program("if_else path_ahead { move }"), ParseError);
  CHECK_THROWS_AS(parse_program("move }"), ParseError);
  // Out-of-palette counts still parse; validation flags them.
  CHECK(parse_program("repeat 12 { move }").blocks[0].count == 12);
}

TEST_CASE("serialize_program writes the canonical text") {
  CHECK(serialize_program(Program({Block::move()})) == "move\n");
  CHECK(serialize_program(Program()) == "");
  const Program nested({Block::repeat_until_goal(
      {Block::if_else(Condition::PathAhead, {Block::move()},
                      {Block::if_else(Condition::PathLeft, {Block::turn_left()}, {Block::turn_right()})})})});
  CHECK(serialize_program(nested) ==
        "repeat_until_goal {\n"
        "  if_else path_ahead {\n"
        "    move\n"
        "  } else {\n"
        "    if_else path_left {\n"
        "      turn_left\n"
        "    } else {\n"
        "      turn_right\n"
        "    }\n"
        "  }\n"
        "}\n");
  CHECK(serialize_program(Program({Block::repeat(3)})) == "repeat 3 {\n}\n");
}

TEST_CASE("parse and serialize round-trip over random programs") {
  testing::ProgramGenerator gen(11, 4, 20);
  for (int i = 0; i < 2000; ++i) {
    Program p = gen.next();
    REQUIRE(p.depth() <= 4);
    REQUIRE(p.node_count() <= 20);
    CHECK(parse_program(serialize_program(p)) == p);
    CHECK(program_from_wire(to_wire(p)) == p);
  }
}

TEST_CASE("wire AST uses the documented record shape") {
  auto j = to_wire(parse_program("repeat 3 { move } if_else path_left { turn_left } else { }"));
  CHECK(j.dump() ==
        R"([{"body":[{"kind":"move"}],"count":3,"kind":"repeat"},)"
        R"({"body":[{"kind":"turn_left"}],"cond":"path_left","else_body":[],"kind":"if_else"}])");
  CHECK_THROWS_AS(program_from_wire(nlohmann::json::parse(R"([{"kind":"jump"}])")), Error);
  CHECK_THROWS_AS(program_from_wire(nlohmann::json::parse(R"([{"kind":"if","body":[]}])")), Error);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(corridor({"S.."}), Error);
  CHECK_THROWS_AS(corridor({"S.G", ".."}), Error);
  CHECK_THROWS_AS(corridor({"SxG"}), Error);
  CHECK_THROWS_AS(corridor({std::string(13, '.') + "SG"}), Error);
  TaskGrid g = corridor({"#S.G"});
  CHECK(g.width() == 4);
  CHECK(g.free_cell_count() == 3);
  CHECK(g.to_rows() == std::vector<std::string>{"#S.G"});
  CHECK(g.canonical_text() == "#S.G/E");
}

TEST_CASE("execute: outcome rules") {
  const TaskGrid g = corridor({"S.G", "#.#"});
  SUBCASE("empty program is incomplete") {
    auto r = execute(Program(), g);
    CHECK(r.outcome == Outcome::Incomplete);
    CHECK(r.steps == 0);
  }
  SUBCASE("moving into a wall crashes at once") {
    auto r = execute(parse_program("turn_right turn_right move move"), corridor({"#S.G"}));
    CHECK(r.outcome == Outcome::Crash);
    CHECK(r.steps == 3);
    r = execute(parse_program("move"), corridor({"S#G"}));
    CHECK(r.outcome == Outcome::Crash);
    CHECK(r.steps == 1);
    CHECK(r.trace.size() == 1);
  }
  SUBCASE("off-grid move crashes") {
    auto r = execute(parse_program("turn_left move"), g);
    CHECK(r.outcome == Outcome::Crash);
  }
  SUBCASE("reaching the goal halts immediately") {
    auto r = execute(parse_program("move move move move"), g);
    CHECK(r.outcome == Outcome::Success);
    CHECK(r.steps == 2);
  }
  SUBCASE("program end without goal") {
    auto r = execute(parse_program("move turn_right"), g);
    CHECK(r.outcome == Outcome::Incomplete);
    CHECK(r.final_pose(g) == Pose{{0, 1}, Direction::South});
  }
  SUBCASE("step limit") {
    auto r = execute(parse_program("repeat_until_goal { turn_left }"), g, 50);
    CHECK(r.outcome == Outcome::StepLimitExceeded);
    CHECK(r.steps == 50);
    r = execute(parse_program("repeat_until_goal { }"), g, 7);
    CHECK(r.outcome == Outcome::StepLimitExceeded);
    CHECK(r.steps == 7);
    CHECK(r.trace.back().action == TraceAction::Idle);
    // A loop whose body takes no action on this grid still runs out of steps.
    r = execute(parse_program("repeat_until_goal { if path_left { move } }"), g, 9);
    CHECK(r.outcome == Outcome::StepLimitExceeded);
  }
  SUBCASE("conditions look at the adjacent cell relative to the pose") {
    Pose p{{0, 1}, Direction::East};
    CHECK(condition_holds(g, p, Condition::PathAhead));
    CHECK(condition_holds(g, p, Condition::PathRight));
    CHECK_FALSE(condition_holds(g, p, Condition::PathLeft));
  }
  SUBCASE("branch events carry the preorder index of the conditional") {
    auto r = execute(parse_program("move if path_right { turn_right } if_else path_ahead { move } else { }"), g);
    REQUIRE(r.branches.size() == 2);
    CHECK(r.branches[0] == BranchEvent{1, true});
    CHECK(r.branches[1] == BranchEvent{3, true});
  }
}

TEST_CASE("execute invariants over random programs") {
  const TaskSpec& t10 = catalog().at("T10");
  testing::ProgramGenerator gen(5, 4, 20);
  for (int i = 0; i < 3000; ++i) {
    Program p = gen.next();
    auto a = execute(p, t10.grid, 200);
    auto b = execute(p, t10.grid, 200);
    CHECK(a.outcome == b.outcome);
    CHECK(a.trace == b.trace);
    CHECK(a.steps <= 200);
    CHECK(a.trace.size() == static_cast<std::size_t>(a.steps));
    bool goal_seen = false;
    for (const auto& e : a.trace) goal_seen = goal_seen || e.pose.cell == t10.grid.goal();
    CHECK(goal_seen == a.success());
  }
}

TEST_CASE("validate_program") {
  const TaskSpec& t01 = catalog().at("T01");
  auto report = validate_program(parse_program("repeat 2 { move }"), t01);
  REQUIRE(report.size() == 1);
  CHECK(report[0].kind == Violation::Kind::Palette);

  TaskSpec limited = t01;
  limited.block_limit = 10;
  report = validate_program(parse_program(std::string(11 * 5, ' ').replace(0, 0, "move move move move move move move move move move move")), limited);
  REQUIRE(report.size() == 1);
  CHECK(report[0].kind == Violation::Kind::BlockLimit);

  const TaskSpec& t02 = catalog().at("T02");
  report = validate_program(parse_program("repeat 12 { move }"), t02);
  REQUIRE(report.size() == 1);
  CHECK(report[0].kind == Violation::Kind::RepeatCount);

  const TaskSpec& t10 = catalog().at("T10");
  CHECK(validate_program(t10.solution, t10).empty());
}

TEST_CASE("T10 solution follows the corridor to the goal") {
  const TaskSpec& t10 = catalog().at("T10");
  CHECK(t10.solution == parse_program("repeat_until_goal { if_else path_ahead { move } else { turn_left } }"));
  auto r = execute(t10.solution, t10.grid);
  CHECK(r.success());
  // Hand-stepped: 13 moves along the corridor plus the two left turns at its corners.
  CHECK(std::count_if(r.trace.begin(), r.trace.end(), [](auto& e) { return e.action == TraceAction::Move; }) == 11);
  CHECK(std::count_if(r.trace.begin(), r.trace.end(), [](auto& e) { return e.action == TraceAction::TurnLeft; }) == 2);
}

TEST_CASE("is_solution") {
  for (const TaskSpec& t : catalog().tasks()) {
    CAPTURE(t.id);
    CHECK(is_solution(t.solution, t));
    CHECK_FALSE(is_solution(Program(), t));
  }
  CHECK_FALSE(is_solution(catalog().at("T01").solution, catalog().at("T12")));
}

TEST_CASE("bundled catalog matches the study's concept table") {
  const auto& cat = catalog();
  REQUIRE(cat.tasks().size() == 27);
  CHECK(cat.curriculum(Phase::Learning).size() == 12);
  CHECK(cat.curriculum(Phase::PostLearning).size() == 15);
  const std::vector<std::pair<std::string, std::string>> table = {
      {"T01", "Basic moves and turns"}, {"P01", "Basic moves and turns"}, {"P08", "Basic moves and turns"},
      {"T02", "Repeat{}"}, {"T03", "Repeat{}"}, {"T05", "Repeat{}"}, {"P02", "Repeat{}"},
      {"T04", "Repeat{};Repeat{}"}, {"P11", "Repeat{};Repeat{};Repeat{}"},
      {"T06", "RepeatUntil{}"}, {"T07", "RepeatUntil{}"}, {"P03", "RepeatUntil{}"},
      {"P04", "RepeatUntil{}"}, {"P09", "RepeatUntil{}"},
      {"T08", "RepeatUntil{If}"}, {"T09", "RepeatUntil{If}"}, {"P05", "RepeatUntil{If}"},
      {"P10", "RepeatUntil{If}"},
      {"T10", "RepeatUntil{IfElse}"}, {"T11", "RepeatUntil{IfElse}"}, {"P06", "RepeatUntil{IfElse}"},
      {"T12", "RepeatUntil{IfElse{IfElse}}"}, {"P07", "RepeatUntil{IfElse{IfElse}}"},
      {"P15", "RepeatUntil{IfElse{IfElse}}"},
      {"P12", "Repeat{};RepeatUntil{}"}, {"P13", "Repeat{Repeat}"}, {"P14", "Repeat{If}"}};
  CHECK(table.size() == 27);
  for (const auto& [id, concept_row] : table) {
    CAPTURE(id);
    CHECK(cat.at(id).concepts == std::vector<std::string>{concept_row});
  }
  for (const auto& [dup, original] : duplicate_pairs()) {
    CHECK(cat.at(dup).grid == cat.at(original).grid);
    CHECK(cat.at(dup).solution == cat.at(original).solution);
  }
  for (const char* id : {"T01", "T02", "T03", "T04"}) CHECK(cat.at(id).difficulty == Difficulty::EasyL);
  for (const char* id : {"P01", "P02", "P08"}) CHECK(cat.at(id).difficulty == Difficulty::EasyPL);
  for (const char* id : {"P12", "P13", "P14"}) CHECK(cat.at(id).novelty == Novelty::NewPL);
}

TEST_CASE("P13 needs nested repeats within its block limit") {
  const TaskSpec& p13 = catalog().at("P13");
  CHECK(p13.solution.depth() == 3);
  CHECK_FALSE(is_solution(parse_program("repeat 4 { move } turn_left repeat 4 { move } turn_left repeat 4 { move }"), p13));
}

TEST_CASE("catalog loading rejects broken catalogs") {
  namespace fs = std::filesystem;
  const fs::path src = fs::path(MM_TEST_DATA_DIR) / "catalog";
  const fs::path tmp = fs::temp_directory_path() / "mm_catalog_test";
  auto fresh_copy = [&] {
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    for (const auto& e : fs::directory_iterator(src)) fs::copy_file(e.path(), tmp / e.path().filename());
  };

  fresh_copy();
  CHECK(load_task_catalog(tmp).tasks().size() == 27);

  fs::remove(tmp / "P12.json");
  CHECK_THROWS_WITH_AS(load_task_catalog(tmp), doctest::Contains("P12"), CatalogError);

  fresh_copy();
  {
    auto t = task_to_json(catalog().at("P06"));
    t["grid"]["rows"][1] = "#G...##";
    t["grid"]["rows"][1] = std::string(t["grid"]["rows"][1]).substr(0, std::string(t["grid"]["rows"][0]).size());
    std::ofstream(tmp / "P06.json") << t.dump(2);
  }
  CHECK_THROWS_AS(load_task_catalog(tmp), CatalogError);

  fresh_copy();
  {
    auto t = task_to_json(catalog().at("T03"));
    t["difficulty"] = "hard_l";
    std::ofstream(tmp / "T03.json") << t.dump(2);
  }
  CHECK_THROWS_WITH_AS(load_task_catalog(tmp), doctest::Contains("T03"), CatalogError);
  fs::remove_all(tmp);
}
