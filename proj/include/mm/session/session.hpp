#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mm/core/catalog.hpp"
#include "mm/hint/recommend.hpp"
#include "mm/quiz/quiz.hpp"
#include "mm/session/events.hpp"

namespace mm {

/// Three consecutive failures raise the feedback prompt.
inline constexpr int kPromptThreshold = 3;

class SessionError : public Error {
 public:
  using Error::Error;
};
/// The group or phase has no feedback affordance.
class FeedbackUnavailable : public SessionError {
 public:
  using SessionError::SessionError;
};
/// A request carried an idempotency key that was already applied.
class DuplicateRequest : public SessionError {
 public:
  using SessionError::SessionError;
};

struct TaskState {
  std::string task_id;
  Program working_program;
  int attempts = 0;
  int consecutive_failures = 0;
  int feedback_requests = 0;
  bool prompt_shown = false;
  bool solved = false;
  double time_on_task = 0;  // every elapsed delta recorded for the task
  double time_on_intervention = 0;
  /// Answer key of the intervention currently on screen, null when none.
  nlohmann::json pending;

  friend bool operator==(const TaskState&, const TaskState&) = default;
};

nlohmann::json to_json(const TaskState& t);

struct AttemptOutcome {
  bool solved = false;
  bool prompt_now = false;
  ExecutionResult execution;
  std::vector<Violation> violations;
};

/// What request_feedback hands to the caller. `kind` is the payload that was
/// actually delivered: a Code-Quiz request whose quiz cannot be built
/// degrades to "code_rec".
struct FeedbackPayload {
  std::string kind;  // "code_rec", "code_quiz" or "plan_quiz"
  nlohmann::json body;
};

struct TaskMetrics {
  std::string task_id;
  bool solved = false;
  int attempts = 0;
  double time_on_task = 0;
  int feedback_requests = 0;
  double time_on_intervention = 0;
};

struct SessionMetrics {
  std::vector<TaskMetrics> tasks;
  int score = 0;
  int max_score = 0;
  double mean_time_per_task = 0;
  double intervention_rate = 0;  // feedback requests per task
  double time_on_intervention = 0;
};

nlohmann::json to_json(const SessionMetrics& m);

/// Everything feedback dispatch needs besides the session itself.
struct FeedbackServices {
  CodeQuizBuilder* code_quizzes = nullptr;
  const PlanQuizBank* plan_quizzes = nullptr;
  HintLimits hint;
};

using EventSink = std::function<void(const SessionEvent&)>;

/// One student in one phase. All state changes go through events: each
/// operation builds its events and hands them to the same reducer that
/// replay uses, then forwards them to the sink.
class Session {
 public:
  Session(std::string id, std::string pseudonym, Group group, Phase phase, const TaskCatalog& catalog,
          FeedbackServices services = {}, Clock clock = system_clock(), EventSink sink = {});

  /// Rebuilds a session from its log. The first event must be PhaseStart.
  static Session replay(const std::vector<SessionEvent>& events, const TaskCatalog& catalog,
                        FeedbackServices services = {}, Clock clock = system_clock(), EventSink sink = {});

  const std::string& id() const { return id_; }
  const std::string& pseudonym() const { return pseudonym_; }
  Group group() const { return group_; }
  Phase phase() const { return phase_; }
  bool ended() const { return ended_; }
  bool feedback_enabled() const { return group_ != Group::None && phase_ == Phase::Learning; }
  const std::vector<std::string>& curriculum() const { return curriculum_; }
  const TaskState& task(const std::string& task_id) const;
  const std::map<std::string, TaskState>& tasks() const { return tasks_; }
  const std::vector<SessionEvent>& events() const { return events_; }

  AttemptOutcome record_attempt(const std::string& task_id, const Program& program, double elapsed,
                                const std::string& idempotency_key = "");
  FeedbackPayload request_feedback(const std::string& task_id, const Program& current, double elapsed = 0,
                                   const std::string& idempotency_key = "");
  QuizVerdict answer_quiz(const std::string& task_id, std::size_t chosen_index, double elapsed,
                          const std::string& idempotency_key = "");
  /// Applies the pending Code-Rec recommendation; returns the new working program.
  Program adopt_recommendation(const std::string& task_id, double elapsed, const std::string& idempotency_key = "");
  void keep_own_code(const std::string& task_id, double elapsed, const std::string& idempotency_key = "");
  void record_survey(const nlohmann::json& answers);
  void end_phase();

  SessionMetrics metrics() const;

  /// Serialized TaskStates, in curriculum order; the replay round-trip compares these.
  std::string state_fingerprint() const;

 private:
  struct Replaying {};
  Session(Replaying, const TaskCatalog& catalog, FeedbackServices services, Clock clock, EventSink sink);

  void emit(EventKind kind, nlohmann::json payload);
  void apply(const SessionEvent& e);
  TaskState& mutable_task(const std::string& task_id);
  const TaskSpec& spec(const std::string& task_id) const;
  void require_open() const;
  void check_key(const std::string& key) const;
  FeedbackPayload code_rec_payload(const TaskSpec& t, const Program& current, bool degraded);

  const TaskCatalog* catalog_;
  FeedbackServices services_;
  Clock clock_;
  EventSink sink_;

  std::string id_;
  std::string pseudonym_;
  Group group_ = Group::None;
  Phase phase_ = Phase::Learning;
  bool ended_ = false;
  std::vector<std::string> curriculum_;
  std::map<std::string, TaskState> tasks_;
  std::set<std::string> keys_;
  std::vector<SessionEvent> events_;
};

SessionMetrics session_metrics(const Session& s);

}  // namespace mm
