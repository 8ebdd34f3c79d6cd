#include "mm/session/events.hpp"

#include <ctime>
#include <memory>

#include "mm/core/program.hpp"

namespace mm {

std::string_view keyword(Group g) {
  switch (g) {
    case Group::None: return "None";
    case Group::CodeRec: return "CodeRec";
    case Group::CodeQuiz: return "CodeQuiz";
    case Group::PlanQuiz: return "PlanQuiz";
  }
  return "?";
}

std::optional<Group> group_from_keyword(std::string_view s) {
  for (Group g : kAllGroups)
    if (keyword(g) == s) return g;
  return std::nullopt;
}

namespace {

constexpr EventKind kAllEventKinds[] = {
    EventKind::Attempt,    EventKind::FeedbackRequest, EventKind::FeedbackShown,
    EventKind::QuizAnswer, EventKind::AdoptRecommendation, EventKind::KeepOwnCode,
    EventKind::TaskSolved, EventKind::PhaseStart,      EventKind::PhaseEnd,
    EventKind::SurveyResponse};

}  // namespace

std::string_view keyword(EventKind k) {
  switch (k) {
    case EventKind::Attempt: return "Attempt";
    case EventKind::FeedbackRequest: return "FeedbackRequest";
    case EventKind::FeedbackShown: return "FeedbackShown";
    case EventKind::QuizAnswer: return "QuizAnswer";
    case EventKind::AdoptRecommendation: return "AdoptRecommendation";
    case EventKind::KeepOwnCode: return "KeepOwnCode";
    case EventKind::TaskSolved: return "TaskSolved";
    case EventKind::PhaseStart: return "PhaseStart";
    case EventKind::PhaseEnd: return "PhaseEnd";
    case EventKind::SurveyResponse: return "SurveyResponse";
  }
  return "?";
}

std::optional<EventKind> event_kind_from_keyword(std::string_view s) {
  for (EventKind k : kAllEventKinds)
    if (keyword(k) == s) return k;
  return std::nullopt;
}

nlohmann::json to_json(const SessionEvent& e) {
  return {{"ts", e.ts}, {"session", e.session}, {"kind", keyword(e.kind)}, {"payload", e.payload}};
}

SessionEvent event_from_json(const nlohmann::json& j) {
  try {
    auto kind = event_kind_from_keyword(j.at("kind").get<std::string>());
    if (!kind) throw Error("unknown event kind '" + j.at("kind").get<std::string>() + "'");
    return {j.at("ts").get<std::string>(), j.at("session").get<std::string>(), *kind, j.at("payload")};
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed event: ") + e.what());
  }
}

std::string iso8601_utc(std::chrono::system_clock::time_point t) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count() % 1000;
  const std::time_t secs = system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms < 0 ? ms + 1000 : ms));
  return out;
}

Clock system_clock() {
  return [] { return iso8601_utc(std::chrono::system_clock::now()); };
}

ManualClock::ManualClock(std::chrono::system_clock::time_point origin)
    : origin_(origin), offset_(std::make_shared<double>(0.0)) {}

void ManualClock::advance(double seconds) { *offset_ += seconds; }

std::string ManualClock::now() const {
  auto delta = std::chrono::duration_cast<std::chrono::system_clock::duration>(std::chrono::duration<double>(*offset_));
  return iso8601_utc(origin_ + delta);
}

Clock ManualClock::clock() const {
  return [origin = origin_, offset = offset_] {
    auto delta = std::chrono::duration_cast<std::chrono::system_clock::duration>(std::chrono::duration<double>(*offset));
    return iso8601_utc(origin + delta);
  };
}

}  // namespace mm
