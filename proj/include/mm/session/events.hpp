#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

namespace mm {

enum class Group { None, CodeRec, CodeQuiz, PlanQuiz };
inline constexpr Group kAllGroups[] = {Group::None, Group::CodeRec, Group::CodeQuiz, Group::PlanQuiz};
std::string_view keyword(Group g);
std::optional<Group> group_from_keyword(std::string_view s);

enum class EventKind {
  Attempt,
  FeedbackRequest,
  FeedbackShown,
  QuizAnswer,
  AdoptRecommendation,
  KeepOwnCode,
  TaskSolved,
  PhaseStart,
  PhaseEnd,
  SurveyResponse,
};
std::string_view keyword(EventKind k);
std::optional<EventKind> event_kind_from_keyword(std::string_view s);

/// One line of a session log: {"ts", "session", "kind", "payload"}.
struct SessionEvent {
  std::string ts;  // ISO-8601 UTC
  std::string session;
  EventKind kind = EventKind::Attempt;
  nlohmann::json payload;

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

nlohmann::json to_json(const SessionEvent& e);
SessionEvent event_from_json(const nlohmann::json& j);

/// Source of event timestamps.
using Clock = std::function<std::string()>;

std::string iso8601_utc(std::chrono::system_clock::time_point t);
Clock system_clock();

/// Deterministic clock for simulations: starts at `origin` and advances by
/// whatever the caller adds to it.
class ManualClock {
 public:
  explicit ManualClock(std::chrono::system_clock::time_point origin);
  void advance(double seconds);
  std::string now() const;
  Clock clock() const;

 private:
  std::chrono::system_clock::time_point origin_;
  std::shared_ptr<double> offset_;
};

}  // namespace mm
