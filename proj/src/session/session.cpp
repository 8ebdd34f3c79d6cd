#include "mm/session/session.hpp"

#include "mm/core/parser.hpp"
#include "mm/core/wire.hpp"

namespace mm {

nlohmann::json to_json(const TaskState& t) {
  return {{"task_id", t.task_id},
          {"working_program", serialize_program(t.working_program)},
          {"attempts", t.attempts},
          {"consecutive_failures", t.consecutive_failures},
          {"feedback_requests", t.feedback_requests},
          {"prompt_shown", t.prompt_shown},
          {"solved", t.solved},
          {"time_on_task", t.time_on_task},
          {"time_on_intervention", t.time_on_intervention},
          {"pending", t.pending}};
}

nlohmann::json to_json(const SessionMetrics& m) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const TaskMetrics& t : m.tasks)
    tasks.push_back({{"task_id", t.task_id},
                     {"solved", t.solved},
                     {"attempts", t.attempts},
                     {"time_on_task", t.time_on_task},
                     {"feedback_requests", t.feedback_requests},
                     {"time_on_intervention", t.time_on_intervention}});
  return {{"tasks", tasks},
          {"score", m.score},
          {"max_score", m.max_score},
          {"mean_time_per_task", m.mean_time_per_task},
          {"intervention_rate", m.intervention_rate},
          {"time_on_intervention", m.time_on_intervention}};
}

Session::Session(std::string id, std::string pseudonym, Group group, Phase phase, const TaskCatalog& catalog,
                 FeedbackServices services, Clock clock, EventSink sink)
    : Session(Replaying{}, catalog, services, std::move(clock), std::move(sink)) {
  id_ = std::move(id);
  emit(EventKind::PhaseStart, {{"pseudonym", pseudonym}, {"group", keyword(group)}, {"phase", keyword(phase)}});
}

Session::Session(Replaying, const TaskCatalog& catalog, FeedbackServices services, Clock clock, EventSink sink)
    : catalog_(&catalog), services_(services), clock_(std::move(clock)), sink_(std::move(sink)) {}

Session Session::replay(const std::vector<SessionEvent>& events, const TaskCatalog& catalog,
                        FeedbackServices services, Clock clock, EventSink sink) {
  if (events.empty() || events.front().kind != EventKind::PhaseStart)
    throw SessionError("a session log must start with PhaseStart");
  Session s(Replaying{}, catalog, services, std::move(clock), std::move(sink));
  s.id_ = events.front().session;
  for (const SessionEvent& e : events) {
    if (e.session != s.id_) throw SessionError("event for session " + e.session + " in log of " + s.id_);
    s.apply(e);
  }
  return s;
}

const TaskState& Session::task(const std::string& task_id) const {
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) throw SessionError("task " + task_id + " is not in this session's curriculum");
  return it->second;
}

TaskState& Session::mutable_task(const std::string& task_id) {
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) throw SessionError("task " + task_id + " is not in this session's curriculum");
  return it->second;
}

const TaskSpec& Session::spec(const std::string& task_id) const {
  task(task_id);
  return catalog_->at(task_id);
}

void Session::require_open() const {
  if (ended_) throw SessionError("the phase has ended");
}

void Session::check_key(const std::string& key) const {
  if (!key.empty() && keys_.contains(key)) throw DuplicateRequest("request " + key + " was already applied");
}

void Session::emit(EventKind kind, nlohmann::json payload) {
  std::string ts = clock_();
  if (!events_.empty() && ts < events_.back().ts) ts = events_.back().ts;
  SessionEvent e{std::move(ts), id_, kind, std::move(payload)};
  apply(e);
  if (sink_) sink_(e);
}

void Session::apply(const SessionEvent& e) {
  const nlohmann::json& p = e.payload;
  if (e.kind != EventKind::PhaseStart && curriculum_.empty()) throw SessionError("event before PhaseStart");
  if (auto it = p.find("idempotency_key"); it != p.end() && !it->get<std::string>().empty())
    keys_.insert(it->get<std::string>());
  switch (e.kind) {
    case EventKind::PhaseStart: {
      if (!curriculum_.empty()) throw SessionError("duplicate PhaseStart");
      pseudonym_ = p.at("pseudonym").get<std::string>();
      auto g = group_from_keyword(p.at("group").get<std::string>());
      auto ph = phase_from_keyword(p.at("phase").get<std::string>());
      if (!g || !ph) throw SessionError("PhaseStart: bad group or phase");
      group_ = *g;
      phase_ = *ph;
      for (const TaskSpec* t : catalog_->curriculum(phase_)) {
        curriculum_.push_back(t->id);
        TaskState st;
        st.task_id = t->id;
        tasks_.emplace(t->id, std::move(st));
      }
      break;
    }
    case EventKind::Attempt: {
      TaskState& t = mutable_task(p.at("task").get<std::string>());
      t.working_program = parse_program(p.at("program").get<std::string>());
      t.attempts += 1;
      t.time_on_task += p.at("elapsed").get<double>();
      if (p.at("solved").get<bool>()) {
        t.consecutive_failures = 0;
      } else {
        t.consecutive_failures += 1;
      }
      if (p.at("prompt_now").get<bool>()) t.prompt_shown = true;
      break;
    }
    case EventKind::TaskSolved: mutable_task(p.at("task").get<std::string>()).solved = true; break;
    case EventKind::FeedbackRequest: {
      TaskState& t = mutable_task(p.at("task").get<std::string>());
      t.working_program = parse_program(p.at("program").get<std::string>());
      t.feedback_requests += 1;
      t.time_on_task += p.at("elapsed").get<double>();
      break;
    }
    case EventKind::FeedbackShown: {
      TaskState& t = mutable_task(p.at("task").get<std::string>());
      t.pending = {{"kind", p.at("kind")}, {"answer_key", p.at("answer_key")}};
      break;
    }
    case EventKind::QuizAnswer: {
      TaskState& t = mutable_task(p.at("task").get<std::string>());
      const double dt = p.at("elapsed").get<double>();
      t.time_on_task += dt;
      t.time_on_intervention += dt;
      if (p.at("correct").get<bool>()) t.pending = nullptr;
      break;
    }
    case EventKind::AdoptRecommendation: {
      TaskState& t = mutable_task(p.at("task").get<std::string>());
      const double dt = p.at("elapsed").get<double>();
      t.working_program = parse_program(p.at("program").get<std::string>());
      t.time_on_task += dt;
      t.time_on_intervention += dt;
      t.pending = nullptr;
      break;
    }
    case EventKind::KeepOwnCode: {
      TaskState& t = mutable_task(p.at("task").get<std::string>());
      const double dt = p.at("elapsed").get<double>();
      t.time_on_task += dt;
      t.time_on_intervention += dt;
      t.pending = nullptr;
      break;
    }
    case EventKind::PhaseEnd: ended_ = true; break;
    case EventKind::SurveyResponse: break;
  }
  events_.push_back(e);
}

AttemptOutcome Session::record_attempt(const std::string& task_id, const Program& program, double elapsed,
                                       const std::string& key) {
  require_open();
  check_key(key);
  const TaskSpec& t = spec(task_id);
  const TaskState& st = task(task_id);
  AttemptOutcome out;
  out.violations = validate_program(program, t);
  out.execution = execute(program, t.grid);
  out.solved = out.violations.empty() && out.execution.success();
  out.prompt_now = !out.solved && st.consecutive_failures + 1 == kPromptThreshold && feedback_enabled() &&
                   !st.prompt_shown;
  const bool first_solve = out.solved && !st.solved;
  emit(EventKind::Attempt, {{"task", task_id},
                            {"program", serialize_program(program)},
                            {"elapsed", elapsed},
                            {"solved", out.solved},
                            {"prompt_now", out.prompt_now},
                            {"idempotency_key", key}});
  if (first_solve) emit(EventKind::TaskSolved, {{"task", task_id}});
  return out;
}

FeedbackPayload Session::code_rec_payload(const TaskSpec& t, const Program& current, bool degraded) {
  Recommendation r = recommend(current, t.solution, t.palette, services_.hint);
  nlohmann::json body = to_json(render_recommendation(r, current));
  body["kind"] = "code_rec";
  if (degraded) body["degraded_from"] = "code_quiz";
  return {"code_rec", std::move(body)};
}

FeedbackPayload Session::request_feedback(const std::string& task_id, const Program& current, double elapsed,
                                          const std::string& key) {
  require_open();
  if (!feedback_enabled()) throw FeedbackUnavailable("feedback is not available in this session");
  check_key(key);
  const TaskSpec& t = spec(task_id);
  const TaskState& st = task(task_id);

  FeedbackPayload out;
  nlohmann::json answer_key;
  switch (group_) {
    case Group::CodeRec: out = code_rec_payload(t, current, false); break;
    case Group::CodeQuiz: {
      if (!services_.code_quizzes) throw SessionError("no Code-Quiz builder configured");
      try {
        CodeQuiz q = services_.code_quizzes->build(current, t);
        std::vector<std::string> fb;
        std::size_t correct = 0;
        for (std::size_t i = 0; i < q.options.size(); ++i) {
          const Action a = q.options[i];
          if (a == q.blanked.correct_action) correct = i;
          fb.push_back(a == q.blanked.correct_action ? std::string() : q.feedback.at(a));
        }
        out = {"code_quiz", to_json(q)};
        answer_key = {{"correct_index", correct}, {"feedback", fb}};
      } catch (const QuizUnavailable&) {
        out = code_rec_payload(t, current, true);
      }
      break;
    }
    case Group::PlanQuiz: {
      if (!services_.plan_quizzes) throw SessionError("no Plan-Quiz content configured");
      const PlanQuiz& q = plan_quiz_for(*services_.plan_quizzes, t, st.feedback_requests + 1);
      out = {"plan_quiz", to_json(q)};
      answer_key = {{"correct_index", q.correct_index}, {"feedback", q.feedback}};
      break;
    }
    case Group::None: break;
  }
  if (out.kind == "code_rec") answer_key = {{"recommended", out.body["recommended"]["text"]}};

  emit(EventKind::FeedbackRequest,
       {{"task", task_id}, {"program", serialize_program(current)}, {"elapsed", elapsed}, {"idempotency_key", key}});
  emit(EventKind::FeedbackShown, {{"task", task_id}, {"kind", out.kind}, {"body", out.body}, {"answer_key", answer_key}});
  return out;
}

QuizVerdict Session::answer_quiz(const std::string& task_id, std::size_t chosen, double elapsed, const std::string& key) {
  require_open();
  check_key(key);
  const TaskState& st = task(task_id);
  if (st.pending.is_null() || st.pending["kind"] == "code_rec")
    throw SessionError("no quiz is open for task " + task_id);
  const auto& ak = st.pending["answer_key"];
  const auto& fb = ak["feedback"];
  if (chosen >= fb.size()) throw SessionError("quiz option index out of range");
  QuizVerdict v;
  v.correct = chosen == ak["correct_index"].get<std::size_t>();
  v.feedback = v.correct ? "" : fb[chosen].get<std::string>();
  emit(EventKind::QuizAnswer, {{"task", task_id},
                               {"chosen", chosen},
                               {"correct", v.correct},
                               {"elapsed", elapsed},
                               {"idempotency_key", key}});
  return v;
}

Program Session::adopt_recommendation(const std::string& task_id, double elapsed, const std::string& key) {
  require_open();
  check_key(key);
  const TaskState& st = task(task_id);
  if (st.pending.is_null() || st.pending["kind"] != "code_rec")
    throw SessionError("no recommendation is open for task " + task_id);
  const std::string text = st.pending["answer_key"]["recommended"].get<std::string>();
  emit(EventKind::AdoptRecommendation,
       {{"task", task_id}, {"program", text}, {"elapsed", elapsed}, {"idempotency_key", key}});
  return task(task_id).working_program;
}

void Session::keep_own_code(const std::string& task_id, double elapsed, const std::string& key) {
  require_open();
  check_key(key);
  const TaskState& st = task(task_id);
  if (st.pending.is_null() || st.pending["kind"] != "code_rec")
    throw SessionError("no recommendation is open for task " + task_id);
  emit(EventKind::KeepOwnCode, {{"task", task_id}, {"elapsed", elapsed}, {"idempotency_key", key}});
}

void Session::record_survey(const nlohmann::json& answers) { emit(EventKind::SurveyResponse, {{"answers", answers}}); }

void Session::end_phase() {
  require_open();
  emit(EventKind::PhaseEnd, nlohmann::json::object());
}

SessionMetrics Session::metrics() const {
  SessionMetrics m;
  m.max_score = static_cast<int>(curriculum_.size());
  double time = 0;
  int requests = 0;
  for (const std::string& id : curriculum_) {
    const TaskState& t = tasks_.at(id);
    m.tasks.push_back({id, t.solved, t.attempts, t.time_on_task, t.feedback_requests, t.time_on_intervention});
    m.score += t.solved;
    time += t.time_on_task;
    requests += t.feedback_requests;
    m.time_on_intervention += t.time_on_intervention;
  }
  if (!curriculum_.empty()) {
    m.mean_time_per_task = time / static_cast<double>(curriculum_.size());
    m.intervention_rate = requests / static_cast<double>(curriculum_.size());
  }
  return m;
}

std::string Session::state_fingerprint() const {
  nlohmann::json j = nlohmann::json::array();
  for (const std::string& id : curriculum_) j.push_back(to_json(tasks_.at(id)));
  return nlohmann::json{{"group", keyword(group_)}, {"phase", keyword(phase_)}, {"ended", ended_}, {"tasks", j}}
      .dump();
}

SessionMetrics session_metrics(const Session& s) { return s.metrics(); }

}  // namespace mm
