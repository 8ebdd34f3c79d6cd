#pragma once

#include <cstdint>
#include <vector>

#include "mm/core/grid.hpp"
#include "mm/core/program.hpp"

namespace mm {

inline constexpr int kDefaultStepLimit = 1000;

enum class Outcome : std::uint8_t { Success, Incomplete, Crash, StepLimitExceeded };
std::string_view keyword(Outcome o);

/// Idle marks a repeat_until_goal iteration that performed no basic action;
/// it costs one step so that such loops run into the step limit.
enum class TraceAction : std::uint8_t { Move, TurnLeft, TurnRight, Idle };
std::string_view keyword(TraceAction a);

struct TraceEntry {
  TraceAction action;
  Pose pose;  // after the action
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

/// One evaluation of an if/if_else condition. `node` is the preorder index of
/// the conditional block within the program.
struct BranchEvent {
  int node = 0;
  bool taken = false;
  friend bool operator==(const BranchEvent&, const BranchEvent&) = default;
};

struct ExecutionResult {
  Outcome outcome = Outcome::Incomplete;
  int steps = 0;
  std::vector<TraceEntry> trace;
  std::vector<BranchEvent> branches;

  bool success() const { return outcome == Outcome::Success; }
  Pose final_pose(const TaskGrid& g) const { return trace.empty() ? g.start() : trace.back().pose; }
};

bool condition_holds(const TaskGrid& g, const Pose& pose, Condition c);

/// Deterministic execution. A move into a wall or off the grid crashes at
/// once; reaching the goal halts with Success at once.
ExecutionResult execute(const Program& p, const TaskGrid& g, int step_limit = kDefaultStepLimit);

}  // namespace mm
