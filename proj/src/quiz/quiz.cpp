#include "mm/quiz/quiz.hpp"

#include <fstream>

#include "mm/core/wire.hpp"
#include "mm/tree/subtrees.hpp"

namespace mm {

namespace {

nlohmann::json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open " + file.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(file.string() + ": " + e.what());
  }
}

Action action_field(const nlohmann::json& j, const char* key) {
  auto a = action_from_keyword(j.at(key).get<std::string>());
  if (!a) throw Error(std::string("feedback templates: bad action in '") + key + "'");
  return *a;
}

PlanQuiz plan_quiz_from_json(const std::string& task_id, PlanStage stage, const nlohmann::json& j) {
  PlanQuiz q;
  q.task_id = task_id;
  q.stage = stage;
  q.prompt = j.at("prompt").get<std::string>();
  q.options = j.at("options").get<std::vector<std::string>>();
  q.correct_index = j.at("correct").get<std::size_t>();
  if (q.options.size() != 4) throw Error(task_id + ": a plan quiz needs exactly 4 options");
  if (q.correct_index >= 4) throw Error(task_id + ": correct option out of range");
  q.feedback.assign(4, "");
  const auto& fb = j.at("feedback");
  for (std::size_t i = 0; i < 4; ++i) {
    if (i == q.correct_index) continue;
    const auto& t = fb.at(i);
    if (!t.is_string() || t.get<std::string>().empty())
      throw Error(task_id + ": missing feedback for option " + std::to_string(i));
    q.feedback[i] = t.get<std::string>();
  }
  return q;
}

}  // namespace

FeedbackTemplates FeedbackTemplates::load(const std::filesystem::path& file) { return from_json(read_json(file)); }

FeedbackTemplates FeedbackTemplates::from_json(const nlohmann::json& j) {
  FeedbackTemplates t;
  for (const auto& entry : j.at("pairs"))
    t.texts_[{action_field(entry, "wrong"), action_field(entry, "correct")}] = entry.at("text").get<std::string>();
  for (Action w : kAllActions)
    for (Action c : kAllActions)
      if (w != c && !t.texts_.contains({w, c}))
        throw Error("feedback templates: no text for " + std::string(keyword(w)) + " instead of " +
                    std::string(keyword(c)));
  return t;
}

const std::string& FeedbackTemplates::text(Action wrong, Action correct) const {
  return texts_.at({wrong, correct});
}

nlohmann::json to_json(const CodeQuiz& q) {
  nlohmann::json options = nlohmann::json::array();
  for (Action a : q.options) {
    nlohmann::json o = {{"action", keyword(a)}};
    options.push_back(o);
  }
  return {
      {"kind", "code_quiz"},
      {"task_id", q.task_id},
      {"grid", {{"rows", q.grid.to_rows()}, {"start_dir", keyword(q.grid.start().dir)}}},
      {"template", {{"ast", q.blanked.to_wire()}, {"text", q.blanked.render()}}},
      {"options", options},
      {"task_grid_fallback", q.task_grid_fallback},
      {"grid_index", q.grid_index},
  };
}

std::string_view keyword(PlanStage s) { return s == PlanStage::Planning ? "planning" : "solution_finding"; }

nlohmann::json to_json(const PlanQuiz& q) {
  return {{"kind", "plan_quiz"}, {"task_id", q.task_id}, {"stage", keyword(q.stage)},
          {"prompt", q.prompt},  {"options", q.options}};
}

PlanQuizBank PlanQuizBank::load(const std::filesystem::path& dir) {
  PlanQuizBank bank;
  if (!std::filesystem::is_directory(dir)) throw Error("quiz directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto& path = entry.path();
    if (path.extension() != ".json" || !path.stem().string().starts_with('T')) continue;
    nlohmann::json j = read_json(path);
    const std::string id = j.at("task_id").get<std::string>();
    try {
      bank.add(plan_quiz_from_json(id, PlanStage::Planning, j.at("planning")));
      bank.add(plan_quiz_from_json(id, PlanStage::SolutionFinding, j.at("solution_finding")));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + ": " + e.what());
    }
  }
  return bank;
}

void PlanQuizBank::add(PlanQuiz q) {
  auto key = std::make_pair(q.task_id, q.stage);
  quizzes_.insert_or_assign(std::move(key), std::move(q));
}

const PlanQuiz& PlanQuizBank::get(const std::string& task_id, PlanStage stage) const {
  auto it = quizzes_.find({task_id, stage});
  if (it == quizzes_.end())
    throw Error("no " + std::string(keyword(stage)) + " quiz authored for task " + task_id);
  return it->second;
}

const PlanQuiz& plan_quiz_for(const PlanQuizBank& bank, const TaskSpec& task, int request_index) {
  if (request_index < 1) throw Error("request index starts at 1");
  return bank.get(task.id, request_index == 1 ? PlanStage::Planning : PlanStage::SolutionFinding);
}

QuizVerdict grade_quiz_answer(const CodeQuiz& q, std::size_t chosen_index) {
  if (chosen_index >= q.options.size()) throw Error("quiz option index out of range");
  const Action a = q.options[chosen_index];
  if (a == q.blanked.correct_action) return {true, ""};
  return {false, q.feedback.at(a)};
}

QuizVerdict grade_quiz_answer(const PlanQuiz& q, std::size_t chosen_index) {
  if (chosen_index >= q.options.size()) throw Error("quiz option index out of range");
  if (chosen_index == q.correct_index) return {true, ""};
  return {false, q.feedback[chosen_index]};
}

Program quiz_source(const Program& c_rec, const Program& c_star) {
  if (has_basic_action(c_rec)) return c_rec;
  const auto subs = rooted_subtrees(c_star);  // from c_star down to the empty program
  auto at = std::find(subs.begin(), subs.end(), c_rec);
  if (at == subs.end()) return c_star;
  for (auto it = std::make_reverse_iterator(at); it != subs.rend(); ++it)
    if (has_basic_action(*it)) return *it;
  return c_star;
}

CodeQuizBuilder::CodeQuizBuilder(FeedbackTemplates templates, CodeQuizOptions options)
    : templates_(std::move(templates)), options_(options) {}

CodeQuiz CodeQuizBuilder::build(const Program& c_stu, const TaskSpec& task, std::optional<std::size_t> grid_index) {
  return build_from(recommend(c_stu, task.solution, task.palette, options_.hint), task, grid_index);
}

CodeQuiz CodeQuizBuilder::build_from(const Recommendation& r, const TaskSpec& task,
                                     std::optional<std::size_t> grid_index) {
  const std::size_t index = grid_index.value_or(0);
  auto key = std::make_tuple(task.id, compact_key(r.c_rec), index);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      if (!it->second) throw QuizUnavailable("no discriminating quiz grid for task " + task.id);
      return *it->second;
    }
  }

  BlankedProgram blanked = place_blank(quiz_source(r.c_rec, task.solution));
  std::optional<CodeQuiz> quiz;
  auto make = [&](TaskGrid grid, bool fallback, std::size_t at) {
    CodeQuiz q{task.id, r.c_rec, blanked, std::move(grid), {Action::Move, Action::TurnLeft, Action::TurnRight},
               {}, fallback, at};
    for (Action a : q.options)
      if (a != blanked.correct_action) q.feedback[a] = templates_.text(a, blanked.correct_action);
    return q;
  };
  try {
    auto grids = synthesize_quiz_grids(blanked, options_.grids);
    if (index >= grids.size())
      throw Error("grid index " + std::to_string(index) + " out of range (" + std::to_string(grids.size()) +
                  " candidates)");
    quiz = make(grids[index], false, index);
  } catch (const GridSynthesisError&) {
    if (is_discriminating(blanked, task.grid)) quiz = make(task.grid, true, 0);
  }

  std::lock_guard lock(mu_);
  cache_.emplace(key, quiz);
  if (!quiz) throw QuizUnavailable("no discriminating quiz grid for task " + task.id);
  return *quiz;
}

CodeQuiz build_code_quiz(const Program& c_stu, const Program& c_star, const TaskSpec& task,
                         const FeedbackTemplates& templates, CodeQuizOptions options) {
  TaskSpec spec = task;
  spec.solution = c_star;
  CodeQuizBuilder builder(templates, options);
  return builder.build(c_stu, spec);
}

}  // namespace mm
