#include "mm/session/content.hpp"

namespace mm {

FeedbackContent::FeedbackContent(FeedbackTemplates templates, PlanQuizBank plans, HintLimits hint)
    : code_quizzes_(std::move(templates), CodeQuizOptions{hint, {}}), plans_(std::move(plans)), hint_(hint) {}

std::unique_ptr<FeedbackContent> FeedbackContent::load(const std::filesystem::path& data_dir, HintLimits hint) {
  auto templates = FeedbackTemplates::load(data_dir / "quizzes" / "code_quiz_feedback.json");
  auto plans = PlanQuizBank::load(data_dir / "quizzes");
  return std::unique_ptr<FeedbackContent>(new FeedbackContent(std::move(templates), std::move(plans), hint));
}

FeedbackServices FeedbackContent::services() { return FeedbackServices{&code_quizzes_, &plans_, hint_}; }

}  // namespace mm
