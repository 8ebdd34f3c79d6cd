#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mm/session/session.hpp"

namespace mm {

/// Log-normal duration in seconds, parameterized by its median.
struct TimeDistribution {
  double median_s = 10;
  double sigma = 0.5;
  double draw(std::mt19937_64& rng) const;
  friend bool operator==(const TimeDistribution&, const TimeDistribution&) = default;
};

/// Population and behaviour parameters of the synthetic cohort.
struct SimulationConfig {
  int students_per_group = 100;
  std::uint64_t seed = 7;

  // skill of concept row c = clamp(ability - difficulty[c] + N(0, concept_sd))
  double ability_mean = 0.5;
  double ability_sd = 0.15;
  double concept_sd = 0.08;
  std::map<std::string, double> concept_difficulty;

  // population means of the behavioural profile fields, jittered per student by behavior_sd
  double corruption_rate = 1.6;  // mean inverse edits in a wrong attempt, >= 1
  double feedback_seek_propensity = 0.3;
  double adopt_recommendation_prob = 0.85;
  double quiz_learning_gain = 0.06;
  double behavior_sd = 0.05;

  int learning_attempt_cap = 8;
  int post_attempt_cap = 6;
  int max_inverse_edits = 4;
  double retry_gain = 0.02;           // per earlier failure on the same task
  double practice_gain = 0.03;        // solving a task unaided
  double adopted_practice_factor = 0.3;
  double prompt_accept_prob = 0.9;
  double follow_up_prob = 0.9;        // asking again after an adopted recommendation still fails
  double transfer_gain = 0.02;        // skill credited to rows absent from learning, per correct quiz answer
  double quiz_accuracy_floor = 0.4;   // P(correct answer) = floor + (1 - floor) * skill
  double quiz_task_boost = 0.1;       // success bonus on the quizzed task itself, per correct answer

  TimeDistribution easy_attempt{20, 0.5};
  TimeDistribution hard_attempt{35, 0.5};
  TimeDistribution recommendation_review{5, 0.4};
  TimeDistribution code_quiz_answer{8, 0.5};
  TimeDistribution plan_quiz_answer{10, 0.5};

  /// Unknown keys are rejected so that typos in study files surface.
  static SimulationConfig from_json(const nlohmann::json& j);
  static SimulationConfig load(const std::filesystem::path& file);
  nlohmann::json to_json() const;
  void validate() const;
};

struct StudentProfile {
  std::map<std::string, double> skill;  // keyed by concept row
  double corruption_rate = 1.6;
  double feedback_seek_propensity = 0.3;
  double adopt_recommendation_prob = 0.85;
  double quiz_learning_gain = 0.06;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Concept rows used by the catalog, learning rows first.
std::vector<std::string> concept_rows(const TaskCatalog& catalog);
/// Rows that appear only in post-learning tasks.
std::vector<std::string> novel_concept_rows(const TaskCatalog& catalog);

StudentProfile draw_profile(const SimulationConfig& config, const TaskCatalog& catalog, std::uint64_t seed);

struct SessionLog {
  std::string session;
  std::vector<SessionEvent> events;
  friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

struct StudentLog {
  std::string pseudonym;
  Group group = Group::None;
  SessionLog learning;
  SessionLog post_learning;
  friend bool operator==(const StudentLog&, const StudentLog&) = default;
};

/// Runs one student through both phases on real sessions.
StudentLog simulate_student(const StudentProfile& profile, const SimulationConfig& config, const TaskCatalog& catalog,
                            Group group, const FeedbackServices& services, const std::string& pseudonym);

/// students_per_group students in each group, simulated on `threads` workers
/// (0 = hardware concurrency). Output order and content do not depend on the
/// thread count.
std::vector<StudentLog> simulate_study(const SimulationConfig& config, const TaskCatalog& catalog,
                                       const FeedbackServices& services, unsigned threads = 0);

/// One <session>.jsonl file per session.
void write_study_logs(const std::vector<StudentLog>& logs, const std::filesystem::path& dir);

}  // namespace mm
