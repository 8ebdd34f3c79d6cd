#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mm/core/grid.hpp"
#include "mm/core/interpreter.hpp"
#include "mm/core/program.hpp"

namespace mm {

/// Set of block kinds a task allows. Basic actions are always allowed.
class Palette {
 public:
  Palette() = default;
  static Palette basic() { return Palette{}; }
  static Palette all();
  Palette with(BlockKind k) const {
    Palette p = *this;
    p.bits_ |= bit(k);
    return p;
  }
  bool allows(BlockKind k) const { return is_basic(k) || (bits_ & bit(k)) != 0; }
  std::vector<BlockKind> kinds() const;
  friend bool operator==(const Palette&, const Palette&) = default;

 private:
  static std::uint8_t bit(BlockKind k) { return static_cast<std::uint8_t>(1u << static_cast<int>(k)); }
  std::uint8_t bits_ = 0;
};

enum class Phase : std::uint8_t { Learning, PostLearning };
enum class Difficulty : std::uint8_t { EasyL, HardL, EasyPL, HardPL };
enum class Novelty : std::uint8_t { CommonPL, NewPL };

std::string_view keyword(Phase p);
std::string_view keyword(Difficulty d);
std::string_view keyword(Novelty n);
std::optional<Phase> phase_from_keyword(std::string_view s);
std::optional<Difficulty> difficulty_from_keyword(std::string_view s);
std::optional<Novelty> novelty_from_keyword(std::string_view s);

struct TaskSpec {
  std::string id;
  TaskGrid grid;
  Palette palette;
  int block_limit = 0;
  Program solution;
  std::vector<std::string> concepts;
  Difficulty difficulty = Difficulty::EasyL;
  std::optional<Novelty> novelty;
  std::string layout_source;  // provenance note for the grid layout

  Phase phase() const { return id.starts_with('T') ? Phase::Learning : Phase::PostLearning; }
};

struct Violation {
  enum class Kind : std::uint8_t { Palette, BlockLimit, RepeatCount };
  Kind kind;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Palette, block-limit and repeat-count violations. Empty means valid.
std::vector<Violation> validate_program(const Program& p, const TaskSpec& t);

/// Valid for the task and reaches the goal within the default step limit.
bool is_solution(const Program& p, const TaskSpec& t);

TaskSpec task_from_json(const nlohmann::json& j);
nlohmann::json task_to_json(const TaskSpec& t);

}  // namespace mm
