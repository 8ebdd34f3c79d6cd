#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "mm/core/task.hpp"

namespace mm {

class CatalogError : public Error {
 public:
  using Error::Error;
};

/// The 12 learning tasks followed by the 15 post-learning tasks.
class TaskCatalog {
 public:
  explicit TaskCatalog(std::vector<TaskSpec> tasks);

  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  const TaskSpec& at(std::string_view id) const;
  const TaskSpec* find(std::string_view id) const;
  std::vector<const TaskSpec*> curriculum(Phase phase) const;

 private:
  std::vector<TaskSpec> tasks_;
};

inline constexpr std::size_t kLearningTaskCount = 12;
inline constexpr std::size_t kPostLearningTaskCount = 15;

/// Task ids in curriculum order: T01..T12, P01..P15.
std::vector<std::string> expected_task_ids(Phase phase);

/// Category tables of the study design.
Difficulty expected_difficulty(std::string_view id);
std::optional<Novelty> expected_novelty(std::string_view id);
/// Post-learning task ids that duplicate a learning task, with the original.
const std::vector<std::pair<std::string, std::string>>& duplicate_pairs();

/// Checks every category, duplication and solvability constraint; throws
/// CatalogError naming the first violation.
void check_catalog(const std::vector<TaskSpec>& tasks);

/// Loads every *.json file in `dir`, one task per file.
TaskCatalog load_task_catalog(const std::filesystem::path& dir);

/// Directory of the bundled data files (catalog/, quizzes/, ...). Honors
/// MM_DATA_DIR, falling back to the path compiled into the build.
std::filesystem::path default_data_dir();

}  // namespace mm
