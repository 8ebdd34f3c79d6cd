#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mm/core/task.hpp"
#include "mm/hint/recommend.hpp"
#include "mm/quiz/blank.hpp"
#include "mm/quiz/grid_synthesis.hpp"

namespace mm {

/// Raised when no Code-Quiz can be built; the session falls back to a Code-Rec payload.
class QuizUnavailable : public Error {
 public:
  using Error::Error;
};

/// Authored feedback for a wrong Code-Quiz choice, keyed by (wrong, correct).
class FeedbackTemplates {
 public:
  static FeedbackTemplates load(const std::filesystem::path& file);
  static FeedbackTemplates from_json(const nlohmann::json& j);
  const std::string& text(Action wrong, Action correct) const;

 private:
  std::map<std::pair<Action, Action>, std::string> texts_;
};

struct CodeQuiz {
  std::string task_id;
  Program recommended;  // the Code-Rec program the quiz is built from
  BlankedProgram blanked;
  TaskGrid grid;
  std::array<Action, 3> options{Action::Move, Action::TurnLeft, Action::TurnRight};
  std::map<Action, std::string> feedback;  // incorrect options only
  bool task_grid_fallback = false;
  std::size_t grid_index = 0;
};

nlohmann::json to_json(const CodeQuiz& q);

enum class PlanStage { Planning, SolutionFinding };
std::string_view keyword(PlanStage s);

struct PlanQuiz {
  std::string task_id;
  PlanStage stage = PlanStage::Planning;
  std::string prompt;
  std::vector<std::string> options;
  std::size_t correct_index = 0;
  std::vector<std::string> feedback;  // empty string at correct_index
};

nlohmann::json to_json(const PlanQuiz& q);

/// Authored Plan-Quiz content, one file per learning task.
class PlanQuizBank {
 public:
  static PlanQuizBank load(const std::filesystem::path& dir);
  void add(PlanQuiz q);
  /// Throws Error when the task has no authored quiz for the stage.
  const PlanQuiz& get(const std::string& task_id, PlanStage stage) const;
  std::size_t size() const { return quizzes_.size(); }

 private:
  std::map<std::pair<std::string, PlanStage>, PlanQuiz> quizzes_;
};

/// Planning on the first request for a task, solution finding afterwards.
const PlanQuiz& plan_quiz_for(const PlanQuizBank& bank, const TaskSpec& task, int request_index);

struct QuizVerdict {
  bool correct = false;
  std::string feedback;  // empty when correct
};

QuizVerdict grade_quiz_answer(const CodeQuiz& q, std::size_t chosen_index);
QuizVerdict grade_quiz_answer(const PlanQuiz& q, std::size_t chosen_index);

/// The program a Code-Quiz is blanked from: c_rec itself, or when c_rec has
/// no basic action, the smallest rooted subtree of c_star above it that has one.
Program quiz_source(const Program& c_rec, const Program& c_star);

struct CodeQuizOptions {
  HintLimits hint;
  GridSynthesisBounds grids;
};

/// Builds Code-Quiz payloads and caches them per (task, c_rec, grid index).
/// Safe to share between threads.
class CodeQuizBuilder {
 public:
  explicit CodeQuizBuilder(FeedbackTemplates templates, CodeQuizOptions options = {});

  /// Throws QuizUnavailable when neither a synthesized nor the task grid discriminates.
  CodeQuiz build(const Program& c_stu, const TaskSpec& task, std::optional<std::size_t> grid_index = {});
  CodeQuiz build_from(const Recommendation& r, const TaskSpec& task, std::optional<std::size_t> grid_index = {});

 private:
  FeedbackTemplates templates_;
  CodeQuizOptions options_;
  std::mutex mu_;
  std::map<std::tuple<std::string, std::string, std::size_t>, std::optional<CodeQuiz>> cache_;
};

/// One-shot form of CodeQuizBuilder::build.
CodeQuiz build_code_quiz(const Program& c_stu, const Program& c_star, const TaskSpec& task,
                         const FeedbackTemplates& templates, CodeQuizOptions options = {});

}  // namespace mm
