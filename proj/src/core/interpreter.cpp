#include "mm/core/interpreter.hpp"

#include <unordered_map>

namespace mm {

std::string_view keyword(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Incomplete: return "incomplete";
    case Outcome::Crash: return "crash";
    case Outcome::StepLimitExceeded: return "step_limit_exceeded";
  }
  return "?";
}

std::string_view keyword(TraceAction a) {
  switch (a) {
    case TraceAction::Move: return "move";
    case TraceAction::TurnLeft: return "turn_left";
    case TraceAction::TurnRight: return "turn_right";
    case TraceAction::Idle: return "idle";
  }
  return "?";
}

bool condition_holds(const TaskGrid& g, const Pose& pose, Condition c) {
  Direction d = pose.dir;
  if (c == Condition::PathLeft) d = turned_left(d);
  if (c == Condition::PathRight) d = turned_right(d);
  return g.is_free(step(pose.cell, d));
}

namespace {

enum class Flow { Continue, Halt };

struct Machine {
  const TaskGrid& grid;
  int limit;
  Pose pose;
  ExecutionResult result;
  std::vector<std::pair<const Block*, bool>> raw_branches;

  Flow emit(TraceAction a) {
    if (result.steps >= limit) {
      result.outcome = Outcome::StepLimitExceeded;
      return Flow::Halt;
    }
    ++result.steps;
    switch (a) {
      case TraceAction::Move: {
        Cell next = step(pose.cell, pose.dir);
        if (!grid.is_free(next)) {
          result.trace.push_back({a, pose});
          result.outcome = Outcome::Crash;
          return Flow::Halt;
        }
        pose.cell = next;
        result.trace.push_back({a, pose});
        if (pose.cell == grid.goal()) {
          result.outcome = Outcome::Success;
          return Flow::Halt;
        }
        return Flow::Continue;
      }
      case TraceAction::TurnLeft: pose.dir = turned_left(pose.dir); break;
      case TraceAction::TurnRight: pose.dir = turned_right(pose.dir); break;
      case TraceAction::Idle: break;
    }
    result.trace.push_back({a, pose});
    return Flow::Continue;
  }

  Flow run(const Sequence& seq) {
    for (const Block& b : seq)
      if (run(b) == Flow::Halt) return Flow::Halt;
    return Flow::Continue;
  }

  Flow run(const Block& b) {
    switch (b.kind) {
      case BlockKind::Move: return emit(TraceAction::Move);
      case BlockKind::TurnLeft: return emit(TraceAction::TurnLeft);
      case BlockKind::TurnRight: return emit(TraceAction::TurnRight);
      case BlockKind::Repeat:
        for (int i = 0; i < b.count; ++i)
          if (run(b.body) == Flow::Halt) return Flow::Halt;
        return Flow::Continue;
      case BlockKind::RepeatUntilGoal:
        // The goal test before each iteration is always false here: reaching
        // the goal halts the whole program immediately.
        for (;;) {
          const int before = result.steps;
          if (run(b.body) == Flow::Halt) return Flow::Halt;
          if (result.steps == before && emit(TraceAction::Idle) == Flow::Halt) return Flow::Halt;
        }
      case BlockKind::If: {
        const bool taken = condition_holds(grid, pose, b.condition);
        raw_branches.emplace_back(&b, taken);
        return taken ? run(b.body) : Flow::Continue;
      }
      case BlockKind::IfElse: {
        const bool taken = condition_holds(grid, pose, b.condition);
        raw_branches.emplace_back(&b, taken);
        return run(taken ? b.body : b.else_body);
      }
    }
    return Flow::Continue;
  }
};

void index_preorder(const Sequence& seq, int& next, std::unordered_map<const Block*, int>& out) {
  for (const Block& b : seq) {
    if (is_conditional(b.kind)) out.emplace(&b, next);
    ++next;
    index_preorder(b.body, next, out);
    index_preorder(b.else_body, next, out);
  }
}

}  // namespace

ExecutionResult execute(const Program& p, const TaskGrid& g, int step_limit) {
  Machine m{g, step_limit, g.start(), {}, {}};
  if (m.run(p.blocks) == Flow::Continue) m.result.outcome = Outcome::Incomplete;
  if (!m.raw_branches.empty()) {
    std::unordered_map<const Block*, int> index;
    int next = 0;
    index_preorder(p.blocks, next, index);
    m.result.branches.reserve(m.raw_branches.size());
    for (auto [blk, taken] : m.raw_branches) m.result.branches.push_back({index.at(blk), taken});
  }
  return std::move(m.result);
}

}  // namespace mm
