#include "mm/quiz/grid_synthesis.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_set>

#include "mm/core/interpreter.hpp"

namespace mm {

namespace {

enum class Op : std::uint8_t { Act, Branch, Jump, RepeatInit, RepeatLoop, Halt };

struct Instr {
  Op op = Op::Halt;
  Action action = Action::Move;
  Condition cond = Condition::PathAhead;
  int arg = 0;  // repeat count, or a jump target
};

/// Flattens the block tree into a jump-based program so that a symbolic
/// state is just (pc, loop counters, pose, known cells) and forks are copies.
class Compiler {
 public:
  std::vector<Instr> code;

  void sequence(const Sequence& seq) {
    for (const Block& b : seq) block(b);
  }

 private:
  int here() const { return static_cast<int>(code.size()); }

  void block(const Block& b) {
    switch (b.kind) {
      case BlockKind::Move:
      case BlockKind::TurnLeft:
      case BlockKind::TurnRight: code.push_back({Op::Act, *action_of(b.kind)}); break;
      case BlockKind::Repeat: {
        if (b.body.empty()) break;
        code.push_back({Op::RepeatInit, Action::Move, Condition::PathAhead, b.count});
        const int start = here();
        sequence(b.body);
        code.push_back({Op::RepeatLoop, Action::Move, Condition::PathAhead, start});
        break;
      }
      case BlockKind::RepeatUntilGoal: {
        // Reaching the goal ends the run, so the loop never exits normally.
        const int start = here();
        sequence(b.body);
        code.push_back({Op::Jump, Action::Move, Condition::PathAhead, start});
        break;
      }
      case BlockKind::If: {
        const std::size_t br = code.size();
        code.push_back({Op::Branch, Action::Move, b.condition, 0});
        sequence(b.body);
        code[br].arg = here();
        break;
      }
      case BlockKind::IfElse: {
        const std::size_t br = code.size();
        code.push_back({Op::Branch, Action::Move, b.condition, 0});
        sequence(b.body);
        const std::size_t jmp = code.size();
        code.push_back({Op::Jump});
        code[br].arg = here();
        sequence(b.else_body);
        code[jmp].arg = here();
        break;
      }
    }
  }
};

enum class Known : std::uint8_t { Wall, Free, Visited };

struct State {
  int pc = 0;
  std::vector<int> counters;
  Pose pose{{0, 0}, Direction::East};
  std::map<Cell, Known> cells;
  int steps = 0;
  int ticks = 0;
  int min_row = 0, max_row = 0, min_col = 0, max_col = 0;
};

Direction relative(Direction d, Condition c) {
  switch (c) {
    case Condition::PathAhead: return d;
    case Condition::PathLeft: return turned_left(d);
    case Condition::PathRight: return turned_right(d);
  }
  return d;
}

bool fits(const State& s, Cell c, int side) {
  return std::max(s.max_row, c.row) - std::min(s.min_row, c.row) < side &&
         std::max(s.max_col, c.col) - std::min(s.min_col, c.col) < side;
}

void mark_free(State& s, Cell c) {
  s.cells[c] = Known::Free;
  s.min_row = std::min(s.min_row, c.row);
  s.max_row = std::max(s.max_row, c.row);
  s.min_col = std::min(s.min_col, c.col);
  s.max_col = std::max(s.max_col, c.col);
}

TaskGrid concretize(const State& s, Cell goal) {
  const int w = s.max_col - s.min_col + 1;
  const int h = s.max_row - s.min_row + 1;
  std::vector<std::uint8_t> walls(static_cast<std::size_t>(w * h), 1);
  for (const auto& [c, k] : s.cells)
    if (k != Known::Wall) walls[static_cast<std::size_t>((c.row - s.min_row) * w + (c.col - s.min_col))] = 0;
  auto shift = [&](Cell c) { return Cell{c.row - s.min_row, c.col - s.min_col}; };
  return TaskGrid(w, h, std::move(walls), Pose{shift({0, 0}), Direction::East}, shift(goal));
}

std::size_t branch_variety(const Program& p, const TaskGrid& g) {
  std::set<std::pair<int, bool>> seen;
  for (const BranchEvent& e : execute(p, g).branches) seen.emplace(e.node, e.taken);
  return seen.size();
}

}  // namespace

bool is_discriminating(const BlankedProgram& b, const TaskGrid& g) {
  for (Action a : kAllActions)
    if (execute(b.fill(a), g).success() != (a == b.correct_action)) return false;
  return true;
}

std::vector<TaskGrid> synthesize_quiz_grids(const BlankedProgram& b, GridSynthesisBounds bounds) {
  Compiler compiler;
  compiler.sequence(b.source.blocks);
  compiler.code.push_back({Op::Halt});
  const std::vector<Instr>& code = compiler.code;
  const int max_ticks = bounds.max_steps * 8 + 64;

  std::vector<TaskGrid> found;
  std::unordered_set<std::string> seen_grids;
  auto offer = [&](State& s, Cell goal) {
    TaskGrid g = concretize(s, goal);
    if (!seen_grids.insert(g.canonical_text()).second) return;
    if (is_discriminating(b, g)) found.push_back(std::move(g));
  };

  std::vector<State> stack(1);
  stack[0].cells[{0, 0}] = Known::Visited;
  std::size_t explored = 0;
  while (!stack.empty() && found.size() < bounds.max_candidates && explored < bounds.max_states) {
    State s = std::move(stack.back());
    stack.pop_back();
    ++explored;
    bool alive = true;
    while (alive) {
      if (++s.ticks > max_ticks) break;
      const Instr& in = code[static_cast<std::size_t>(s.pc)];
      switch (in.op) {
        case Op::Halt: alive = false; break;
        case Op::Jump: s.pc = in.arg; break;
        case Op::RepeatInit:
          s.counters.push_back(in.arg);
          ++s.pc;
          break;
        case Op::RepeatLoop:
          if (--s.counters.back() > 0) {
            s.pc = in.arg;
          } else {
            s.counters.pop_back();
            ++s.pc;
          }
          break;
        case Op::Branch: {
          const Cell c = step(s.pose.cell, relative(s.pose.dir, in.cond));
          auto it = s.cells.find(c);
          bool free;
          if (it != s.cells.end()) {
            free = it->second != Known::Wall;
          } else {
            // Fork: the "wall" world is explored after the "free" one.
            State wall = s;
            wall.cells[c] = Known::Wall;
            wall.pc = in.arg;
            stack.push_back(std::move(wall));
            if (!fits(s, c, bounds.max_side)) {
              alive = false;
              break;
            }
            mark_free(s, c);
            free = true;
          }
          s.pc = free ? s.pc + 1 : in.arg;
          break;
        }
        case Op::Act: {
          if (++s.steps > bounds.max_steps) {
            alive = false;
            break;
          }
          ++s.pc;
          if (in.action == Action::TurnLeft) {
            s.pose.dir = turned_left(s.pose.dir);
            break;
          }
          if (in.action == Action::TurnRight) {
            s.pose.dir = turned_right(s.pose.dir);
            break;
          }
          const Cell c = step(s.pose.cell, s.pose.dir);
          auto it = s.cells.find(c);
          if (it != s.cells.end() && it->second == Known::Wall) {
            alive = false;  // the correct fill would crash here
            break;
          }
          if (it == s.cells.end()) {
            if (!fits(s, c, bounds.max_side)) {
              alive = false;
              break;
            }
            mark_free(s, c);
          }
          s.pose.cell = c;
          if (s.cells[c] == Known::Free) {
            // First visit: either the goal is here, or it is not and the run goes on.
            offer(s, c);
            s.cells[c] = Known::Visited;
          }
          break;
        }
      }
    }
  }

  if (found.empty()) throw GridSynthesisError("no discriminating grid within bounds");
  const Program correct = b.fill(b.correct_action);
  std::vector<std::tuple<int, long, std::string, std::size_t>> order;
  for (std::size_t i = 0; i < found.size(); ++i)
    order.emplace_back(found[i].free_cell_count(), -static_cast<long>(branch_variety(correct, found[i])),
                       found[i].canonical_text(), i);
  std::sort(order.begin(), order.end());
  std::vector<TaskGrid> ranked;
  ranked.reserve(found.size());
  for (const auto& o : order) ranked.push_back(found[std::get<3>(o)]);
  return ranked;
}

}  // namespace mm
