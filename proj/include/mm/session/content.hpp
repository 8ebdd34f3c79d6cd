#pragma once

#include <filesystem>
#include <memory>

#include "mm/session/session.hpp"

namespace mm {

/// Quiz content read from a data directory (quizzes/code_quiz_feedback.json
/// and quizzes/T*.json); owns what FeedbackServices points at.
class FeedbackContent {
 public:
  static std::unique_ptr<FeedbackContent> load(const std::filesystem::path& data_dir, HintLimits hint = {});

  FeedbackServices services();
  const PlanQuizBank& plan_quizzes() const { return plans_; }

 private:
  FeedbackContent(FeedbackTemplates templates, PlanQuizBank plans, HintLimits hint);

  CodeQuizBuilder code_quizzes_;
  PlanQuizBank plans_;
  HintLimits hint_;
};

}  // namespace mm
