#include "mm/study/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "mm/session/store.hpp"
#include "mm/tree/neighborhood.hpp"

namespace mm {

using nlohmann::json;

double TimeDistribution::draw(std::mt19937_64& rng) const {
  std::lognormal_distribution<double> d(std::log(median_s), sigma);
  return std::round(d(rng) * 10) / 10;
}

namespace {

struct Fields {
  std::vector<std::pair<const char*, double*>> reals;
  std::vector<std::pair<const char*, int*>> ints;
  std::vector<std::pair<const char*, TimeDistribution*>> times;
};

template <typename C>
Fields fields_of(C& c) {
  Fields f;
  f.reals = {{"ability_mean", &c.ability_mean},
             {"ability_sd", &c.ability_sd},
             {"concept_sd", &c.concept_sd},
             {"corruption_rate", &c.corruption_rate},
             {"feedback_seek_propensity", &c.feedback_seek_propensity},
             {"adopt_recommendation_prob", &c.adopt_recommendation_prob},
             {"quiz_learning_gain", &c.quiz_learning_gain},
             {"behavior_sd", &c.behavior_sd},
             {"retry_gain", &c.retry_gain},
             {"practice_gain", &c.practice_gain},
             {"adopted_practice_factor", &c.adopted_practice_factor},
             {"prompt_accept_prob", &c.prompt_accept_prob},
             {"follow_up_prob", &c.follow_up_prob},
             {"transfer_gain", &c.transfer_gain},
             {"quiz_accuracy_floor", &c.quiz_accuracy_floor},
             {"quiz_task_boost", &c.quiz_task_boost}};
  f.ints = {{"students_per_group", &c.students_per_group},
            {"learning_attempt_cap", &c.learning_attempt_cap},
            {"post_attempt_cap", &c.post_attempt_cap},
            {"max_inverse_edits", &c.max_inverse_edits}};
  f.times = {{"easy_attempt", &c.easy_attempt},
             {"hard_attempt", &c.hard_attempt},
             {"recommendation_review", &c.recommendation_review},
             {"code_quiz_answer", &c.code_quiz_answer},
             {"plan_quiz_answer", &c.plan_quiz_answer}};
  return f;
}

bool is_probability(double p) { return p >= 0 && p <= 1; }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

SimulationConfig SimulationConfig::from_json(const json& j) {
  if (!j.is_object()) throw Error("simulation config must be an object");
  SimulationConfig c;
  Fields f = fields_of(c);
  std::set<std::string> known = {"seed", "concept_difficulty"};
  for (auto& [k, p] : f.reals) {
    known.insert(k);
    if (j.contains(k)) *p = j.at(k).get<double>();
  }
  for (auto& [k, p] : f.ints) {
    known.insert(k);
    if (j.contains(k)) *p = j.at(k).get<int>();
  }
  for (auto& [k, p] : f.times) {
    known.insert(k);
    if (!j.contains(k)) continue;
    p->median_s = j.at(k).at("median_s").get<double>();
    p->sigma = j.at(k).at("sigma").get<double>();
  }
  for (auto& [k, v] : j.items())
    if (!known.contains(k) && !k.starts_with("_")) throw Error("simulation config: unknown key '" + k + "'");
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("concept_difficulty"))
    c.concept_difficulty = j.at("concept_difficulty").get<std::map<std::string, double>>();
  c.validate();
  return c;
}

SimulationConfig SimulationConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open " + file.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(file.string() + ": " + e.what());
  }
}

json SimulationConfig::to_json() const {
  SimulationConfig copy = *this;
  Fields f = fields_of(copy);
  json j;
  j["seed"] = seed;
  j["concept_difficulty"] = concept_difficulty;
  for (auto& [k, p] : f.reals) j[k] = *p;
  for (auto& [k, p] : f.ints) j[k] = *p;
  for (auto& [k, p] : f.times) j[k] = {{"median_s", p->median_s}, {"sigma", p->sigma}};
  return j;
}

void SimulationConfig::validate() const {
  if (students_per_group < 1) throw Error("students_per_group must be positive");
  if (learning_attempt_cap < 1 || post_attempt_cap < 1) throw Error("attempt caps must be positive");
  if (max_inverse_edits < 1) throw Error("max_inverse_edits must be positive");
  if (corruption_rate < 1) throw Error("corruption_rate is a mean edit count and must be >= 1");
  for (double p : {feedback_seek_propensity, adopt_recommendation_prob, prompt_accept_prob, follow_up_prob,
                   quiz_accuracy_floor, adopted_practice_factor})
    if (!is_probability(p)) throw Error("simulation config: probability outside [0,1]");
  for (double v : {ability_sd, concept_sd, behavior_sd, quiz_learning_gain, practice_gain, retry_gain, quiz_task_boost, transfer_gain})
    if (v < 0) throw Error("simulation config: negative spread or gain");
  SimulationConfig copy = *this;
  for (auto& [k, p] : fields_of(copy).times)
    if (!(p->median_s > 0) || p->sigma < 0) throw Error(std::string("simulation config: bad time distribution ") + k);
}

void StudentProfile::validate() const {
  for (const auto& [row, s] : skill)
    if (!is_probability(s)) throw Error("skill for " + row + " outside [0,1]");
  for (double p : {feedback_seek_propensity, adopt_recommendation_prob})
    if (!is_probability(p)) throw Error("profile probability outside [0,1]");
  if (corruption_rate < 1) throw Error("corruption_rate must be >= 1");
  if (quiz_learning_gain < 0 || quiz_learning_gain > 1) throw Error("quiz_learning_gain outside [0,1]");
}

std::vector<std::string> concept_rows(const TaskCatalog& catalog) {
  std::vector<std::string> rows;
  for (Phase ph : {Phase::Learning, Phase::PostLearning})
    for (const TaskSpec* t : catalog.curriculum(ph))
      for (const std::string& c : t->concepts)
        if (std::find(rows.begin(), rows.end(), c) == rows.end()) rows.push_back(c);
  return rows;
}

std::vector<std::string> novel_concept_rows(const TaskCatalog& catalog) {
  std::set<std::string> learned;
  for (const TaskSpec* t : catalog.curriculum(Phase::Learning)) learned.insert(t->concepts.begin(), t->concepts.end());
  std::vector<std::string> out;
  for (const std::string& r : concept_rows(catalog))
    if (!learned.contains(r)) out.push_back(r);
  return out;
}

StudentProfile draw_profile(const SimulationConfig& config, const TaskCatalog& catalog, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0, 1);
  StudentProfile p;
  p.seed = seed;
  const double ability = config.ability_mean + config.ability_sd * unit(rng);
  for (const std::string& row : concept_rows(catalog)) {
    auto it = config.concept_difficulty.find(row);
    const double difficulty = it == config.concept_difficulty.end() ? 0 : it->second;
    p.skill[row] = clamp01(ability - difficulty + config.concept_sd * unit(rng));
  }
  auto jitter = [&](double mean) { return clamp01(mean + config.behavior_sd * unit(rng)); };
  p.feedback_seek_propensity = jitter(config.feedback_seek_propensity);
  p.adopt_recommendation_prob = jitter(config.adopt_recommendation_prob);
  p.quiz_learning_gain = std::max(0.0, config.quiz_learning_gain + config.behavior_sd * 0.2 * unit(rng));
  p.corruption_rate = std::max(1.0, config.corruption_rate + config.behavior_sd * unit(rng));
  return p;
}

namespace {

class Student {
 public:
  Student(const StudentProfile& profile, const SimulationConfig& config, const TaskCatalog& catalog,
          std::vector<std::string> novel)
      : profile_(profile), config_(config), catalog_(catalog), novel_(std::move(novel)), rng_(profile.seed) {}

  void run_phase(Session& s, ManualClock& clock) {
    const int cap = s.phase() == Phase::Learning ? config_.learning_attempt_cap : config_.post_attempt_cap;
    for (const std::string& id : s.curriculum()) run_task(s, clock, catalog_.at(id), cap);
    s.end_phase();
  }

 private:
  double skill_for(const TaskSpec& t) const {
    double sum = 0;
    for (const std::string& c : t.concepts) sum += profile_.skill.at(c);
    return t.concepts.empty() ? 0.5 : sum / static_cast<double>(t.concepts.size());
  }

  void gain(const TaskSpec& t, double amount) {
    for (const std::string& c : t.concepts) profile_.skill[c] = clamp01(profile_.skill[c] + amount);
  }

  void transfer() {
    for (const std::string& c : novel_) profile_.skill[c] = clamp01(profile_.skill[c] + config_.transfer_gain);
  }

  bool chance(double p) { return std::bernoulli_distribution(clamp01(p))(rng_); }

  // Corruptions that still solve are redrawn: this branch stands for a failed attempt.
  Program wrong_attempt(const TaskSpec& t) {
    std::geometric_distribution<int> extra(1.0 / profile_.corruption_rate);
    const int k = std::min(config_.max_inverse_edits, 1 + extra(rng_));
    for (int tries = 0; tries < 32; ++tries) {
      Program p = corrupt(t.solution, t.palette, k, rng_);
      if (!is_solution(p, t)) return p;
    }
    return Program{};
  }

  double attempt_time(const TaskSpec& t) {
    const bool easy = t.difficulty == Difficulty::EasyL || t.difficulty == Difficulty::EasyPL;
    return (easy ? config_.easy_attempt : config_.hard_attempt).draw(rng_);
  }

  void run_task(Session& s, ManualClock& clock, const TaskSpec& t, int cap) {
    std::optional<Program> adopted;
    bool via_adoption = false;
    double boost = 0;
    for (int a = 0; a < cap; ++a) {
      const double p = skill_for(t) + config_.retry_gain * a + boost;
      Program program;
      if (chance(p)) {
        program = t.solution;
        via_adoption = false;
      } else if (adopted) {
        program = *adopted;
        via_adoption = true;
      } else {
        program = wrong_attempt(t);
        via_adoption = false;
      }
      const double dt = attempt_time(t);
      clock.advance(dt);
      AttemptOutcome out = s.record_attempt(t.id, program, dt);
      if (out.solved) {
        gain(t, config_.practice_gain * (via_adoption ? config_.adopted_practice_factor : 1.0));
        return;
      }
      if (!s.feedback_enabled()) continue;
      const double seek = out.prompt_now ? config_.prompt_accept_prob
                          : adopted  ? config_.follow_up_prob
                                     : profile_.feedback_seek_propensity;
      if (chance(seek)) boost += intervene(s, clock, t, program, adopted);
    }
  }

  /// Returns the success bonus the intervention earned on this task.
  double intervene(Session& s, ManualClock& clock, const TaskSpec& t, const Program& current,
                   std::optional<Program>& adopted) {
    FeedbackPayload fb = s.request_feedback(t.id, current, 0);
    if (fb.kind == "code_rec") {
      const double dt = config_.recommendation_review.draw(rng_);
      clock.advance(dt);
      if (chance(profile_.adopt_recommendation_prob))
        adopted = s.adopt_recommendation(t.id, dt);
      else
        s.keep_own_code(t.id, dt);
      return 0;
    }
    const bool code = fb.kind == "code_quiz";
    const std::size_t options = code ? 3 : 4;
    const std::size_t correct = s.task(t.id).pending.at("answer_key").at("correct_index").get<std::size_t>();
    std::vector<std::size_t> wrong;
    for (std::size_t i = 0; i < options; ++i)
      if (i != correct) wrong.push_back(i);
    std::shuffle(wrong.begin(), wrong.end(), rng_);
    const double p = config_.quiz_accuracy_floor + (1 - config_.quiz_accuracy_floor) * skill_for(t);
    for (std::size_t tries = 0;; ++tries) {
      const double dt = (code ? config_.code_quiz_answer : config_.plan_quiz_answer).draw(rng_);
      clock.advance(dt);
      const bool right = tries == wrong.size() || chance(p);
      QuizVerdict v = s.answer_quiz(t.id, right ? correct : wrong[tries], dt);
      if (v.correct) {
        gain(t, profile_.quiz_learning_gain);
        transfer();
        return config_.quiz_task_boost;
      }
    }
  }

  StudentProfile profile_;
  const SimulationConfig& config_;
  const TaskCatalog& catalog_;
  std::vector<std::string> novel_;
  std::mt19937_64 rng_;
};

std::uint64_t student_seed(std::uint64_t base, std::size_t group, std::size_t index) {
  // splitmix64 over the packed coordinates
  std::uint64_t z = base * 0x9E3779B97F4A7C15ull + (group << 32) + index + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

StudentLog simulate_student(const StudentProfile& profile, const SimulationConfig& config, const TaskCatalog& catalog,
                            Group group, const FeedbackServices& services, const std::string& pseudonym) {
  profile.validate();
  Student student(profile, config, catalog, novel_concept_rows(catalog));
  // 2025-03-01T08:00:00Z
  ManualClock clock(std::chrono::system_clock::time_point(std::chrono::seconds(1740816000)));
  StudentLog log;
  log.pseudonym = pseudonym;
  log.group = group;
  {
    Session s(pseudonym + "-learning", pseudonym, group, Phase::Learning, catalog, services, clock.clock());
    student.run_phase(s, clock);
    log.learning = {s.id(), s.events()};
  }
  clock.advance(600);
  {
    Session s(pseudonym + "-post_learning", pseudonym, group, Phase::PostLearning, catalog, services, clock.clock());
    student.run_phase(s, clock);
    log.post_learning = {s.id(), s.events()};
  }
  return log;
}

std::vector<StudentLog> simulate_study(const SimulationConfig& config, const TaskCatalog& catalog,
                                       const FeedbackServices& services, unsigned threads) {
  config.validate();
  const std::size_t per = static_cast<std::size_t>(config.students_per_group);
  std::vector<StudentLog> out(per * std::size(kAllGroups));
  std::atomic<std::size_t> next{0};
  std::mutex failure_mu;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < out.size(); i = next++) try {
      const std::size_t g = i / per, k = i % per;
      const Group group = kAllGroups[g];
      const std::uint64_t seed = student_seed(config.seed, g, k);
      char name[64];
      std::snprintf(name, sizeof name, "sim-%s-%03zu", std::string(keyword(group)).c_str(), k + 1);
      out[i] = simulate_student(draw_profile(config, catalog, seed), config, catalog, group, services, name);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = out.size();
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

void write_study_logs(const std::vector<StudentLog>& logs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const StudentLog& s : logs)
    for (const SessionLog* l : {&s.learning, &s.post_learning}) write_event_log(dir / (l->session + ".jsonl"), l->events);
}

}  // namespace mm
