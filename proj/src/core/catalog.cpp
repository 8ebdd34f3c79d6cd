#include "mm/core/catalog.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#ifndef MM_DEFAULT_DATA_DIR
#define MM_DEFAULT_DATA_DIR "data"
#endif

namespace mm {

namespace {

std::string numbered(char prefix, int i) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%c%02d", prefix, i);
  return buf;
}

bool same_task_content(const TaskSpec& a, const TaskSpec& b) {
  return a.grid == b.grid && a.palette == b.palette && a.block_limit == b.block_limit &&
         a.solution == b.solution && a.concepts == b.concepts;
}

}  // namespace

TaskCatalog::TaskCatalog(std::vector<TaskSpec> tasks) : tasks_(std::move(tasks)) { check_catalog(tasks_); }

const TaskSpec* TaskCatalog::find(std::string_view id) const {
  for (const auto& t : tasks_)
    if (t.id == id) return &t;
  return nullptr;
}

const TaskSpec& TaskCatalog::at(std::string_view id) const {
  if (const TaskSpec* t = find(id)) return *t;
  throw Error("unknown task '" + std::string(id) + "'");
}

std::vector<const TaskSpec*> TaskCatalog::curriculum(Phase phase) const {
  std::vector<const TaskSpec*> out;
  for (const auto& t : tasks_)
    if (t.phase() == phase) out.push_back(&t);
  return out;
}

std::vector<std::string> expected_task_ids(Phase phase) {
  std::vector<std::string> ids;
  if (phase == Phase::Learning)
    for (int i = 1; i <= static_cast<int>(kLearningTaskCount); ++i) ids.push_back(numbered('T', i));
  else
    for (int i = 1; i <= static_cast<int>(kPostLearningTaskCount); ++i) ids.push_back(numbered('P', i));
  return ids;
}

Difficulty expected_difficulty(std::string_view id) {
  static const std::set<std::string, std::less<>> easy_l = {"T01", "T02", "T03", "T04"};
  static const std::set<std::string, std::less<>> easy_pl = {"P01", "P02", "P08"};
  if (id.starts_with('T')) return easy_l.contains(id) ? Difficulty::EasyL : Difficulty::HardL;
  return easy_pl.contains(id) ? Difficulty::EasyPL : Difficulty::HardPL;
}

std::optional<Novelty> expected_novelty(std::string_view id) {
  static const std::set<std::string, std::less<>> common = {"P01", "P02", "P04", "P05", "P06", "P07"};
  static const std::set<std::string, std::less<>> fresh = {"P12", "P13", "P14"};
  if (common.contains(id)) return Novelty::CommonPL;
  if (fresh.contains(id)) return Novelty::NewPL;
  return std::nullopt;
}

const std::vector<std::pair<std::string, std::string>>& duplicate_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"P01", "T01"}, {"P02", "T03"}, {"P04", "T07"}, {"P05", "T08"}, {"P06", "T10"}, {"P07", "T12"}};
  return pairs;
}

void check_catalog(const std::vector<TaskSpec>& tasks) {
  std::vector<std::string> expected = expected_task_ids(Phase::Learning);
  for (auto& id : expected_task_ids(Phase::PostLearning)) expected.push_back(std::move(id));
  for (const auto& id : expected) {
    auto n = std::count_if(tasks.begin(), tasks.end(), [&](const TaskSpec& t) { return t.id == id; });
    if (n == 0) throw CatalogError("catalog is missing task " + id);
    if (n > 1) throw CatalogError("catalog defines task " + id + " more than once");
  }
  if (tasks.size() != expected.size()) throw CatalogError("catalog contains tasks outside T01-T12/P01-P15");
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (tasks[i].id != expected[i]) throw CatalogError("catalog tasks are not in curriculum order");

  auto by_id = [&](const std::string& id) -> const TaskSpec& {
    return *std::find_if(tasks.begin(), tasks.end(), [&](const TaskSpec& t) { return t.id == id; });
  };
  for (const TaskSpec& t : tasks) {
    if (t.difficulty != expected_difficulty(t.id))
      throw CatalogError("task " + t.id + " has difficulty " + std::string(keyword(t.difficulty)) +
                         ", expected " + std::string(keyword(expected_difficulty(t.id))));
    if (t.novelty != expected_novelty(t.id))
      throw CatalogError("task " + t.id + " has the wrong novelty category");
    if (t.concepts.empty()) throw CatalogError("task " + t.id + " has no concept tags");
    if (!validate_program(t.solution, t).empty())
      throw CatalogError("solution of " + t.id + " violates its own palette or block limit");
    if (!execute(t.solution, t.grid).success())
      throw CatalogError("solution of " + t.id + " does not reach the goal");
  }
  for (const auto& [dup, original] : duplicate_pairs())
    if (!same_task_content(by_id(dup), by_id(original)))
      throw CatalogError("task " + dup + " must be identical to " + original);
}

TaskCatalog load_task_catalog(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw CatalogError("catalog directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::vector<TaskSpec> tasks;
  for (const auto& f : files) {
    std::ifstream in(f);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CatalogError(f.filename().string() + ": " + e.what());
    }
    try {
      tasks.push_back(task_from_json(j));
    } catch (const Error& e) {
      throw CatalogError(f.filename().string() + ": " + e.what());
    }
  }
  // T-tasks before P-tasks, numeric order within each phase.
  std::sort(tasks.begin(), tasks.end(), [](const TaskSpec& a, const TaskSpec& b) {
    if (a.id[0] != b.id[0]) return a.id[0] == 'T';
    return a.id < b.id;
  });
  return TaskCatalog(std::move(tasks));
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("MM_DATA_DIR"); env && *env) return env;
  return MM_DEFAULT_DATA_DIR;
}

}  // namespace mm
