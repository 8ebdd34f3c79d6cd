#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mm/study/simulation.hpp"
#include "mm/study/stats.hpp"

namespace mm {

struct StudentRecord {
  std::string pseudonym;
  Group group = Group::None;
  std::optional<SessionMetrics> learning;
  std::optional<SessionMetrics> post_learning;
};

/// Per-student metrics of both phases, grouped by intervention group.
struct StudyDataset {
  std::map<Group, std::vector<StudentRecord>> groups;
};

/// Replays each log and joins the two phases of a student by pseudonym.
StudyDataset dataset_from_logs(const std::vector<std::vector<SessionEvent>>& logs, const TaskCatalog& catalog);
StudyDataset dataset_from_logs(const std::vector<StudentLog>& logs, const TaskCatalog& catalog);
/// Reads every *.jsonl file in `dir`.
StudyDataset load_dataset(const std::filesystem::path& dir, const TaskCatalog& catalog);

/// A named set of tasks a success rate is computed over.
struct TaskSlice {
  std::string id;
  std::string label;
  std::vector<std::string> task_ids;
};

/// HoC, Easy_L, Hard_L, Common_L, PostHoC, Easy_PL, Hard_PL, Common_PL, New_PL, P12, P13, P14.
std::vector<TaskSlice> task_slices(const TaskCatalog& catalog);
const TaskSlice& task_slice(const std::vector<TaskSlice>& slices, std::string_view id);

/// Percentage of the slice's tasks solved; nullopt when none of them was recorded.
std::optional<double> success_rate(const SessionMetrics& m, const TaskSlice& slice);

/// Report tables mirroring the learning- and post-learning-phase figures. Each
/// column carries the Shapiro-Wilk check over all groups, Kruskal-Wallis
/// across groups, and per group the mean, SE, Mann-Whitney U against the
/// reference group with stars and Cohen's d. Throws when a group is missing.
nlohmann::json analyze(const StudyDataset& dataset, const TaskCatalog& catalog);

std::string render_report_markdown(const nlohmann::json& report);

struct PatternCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The ordinal result patterns the simulation is calibrated to reproduce.
std::vector<PatternCheck> check_study_patterns(const nlohmann::json& report);

}  // namespace mm
