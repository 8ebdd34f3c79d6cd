#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mm {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BlockKind : std::uint8_t { Move, TurnLeft, TurnRight, Repeat, RepeatUntilGoal, If, IfElse };
enum class Condition : std::uint8_t { PathAhead, PathLeft, PathRight };

/// The three basic actions a basic block performs.
enum class Action : std::uint8_t { Move, TurnLeft, TurnRight };

inline constexpr Action kAllActions[] = {Action::Move, Action::TurnLeft, Action::TurnRight};
inline constexpr Condition kAllConditions[] = {Condition::PathAhead, Condition::PathLeft,
                                               Condition::PathRight};
inline constexpr BlockKind kAllKinds[] = {BlockKind::Move,   BlockKind::TurnLeft,
                                          BlockKind::TurnRight, BlockKind::Repeat,
                                          BlockKind::RepeatUntilGoal, BlockKind::If,
                                          BlockKind::IfElse};

inline constexpr int kMinRepeatCount = 2;
inline constexpr int kMaxRepeatCount = 9;

constexpr bool is_basic(BlockKind k) {
  return k == BlockKind::Move || k == BlockKind::TurnLeft || k == BlockKind::TurnRight;
}
constexpr bool is_conditional(BlockKind k) { return k == BlockKind::If || k == BlockKind::IfElse; }
constexpr BlockKind kind_of(Action a) {
  switch (a) {
    case Action::Move: return BlockKind::Move;
    case Action::TurnLeft: return BlockKind::TurnLeft;
    case Action::TurnRight: return BlockKind::TurnRight;
  }
  return BlockKind::Move;
}
std::optional<Action> action_of(BlockKind k);

std::string_view keyword(BlockKind k);
std::string_view keyword(Condition c);
std::string_view keyword(Action a);
std::optional<BlockKind> block_kind_from_keyword(std::string_view word);
std::optional<Condition> condition_from_keyword(std::string_view word);
std::optional<Action> action_from_keyword(std::string_view word);

/// One node of the block AST. `count` is meaningful for Repeat only and
/// `condition` for If/IfElse only; the factories keep the unused fields at
/// their defaults so that defaulted equality is structural equality.
struct Block {
  BlockKind kind = BlockKind::Move;
  int count = 0;
  Condition condition = Condition::PathAhead;
  std::vector<Block> body;
  std::vector<Block> else_body;

  static Block action(Action a) {
    Block b;
    b.kind = kind_of(a);
    return b;
  }
  static Block move() { return action(Action::Move); }
  static Block turn_left() { return action(Action::TurnLeft); }
  static Block turn_right() { return action(Action::TurnRight); }
  static Block repeat(int n, std::vector<Block> body = {}) {
    return Block{BlockKind::Repeat, n, Condition::PathAhead, std::move(body), {}};
  }
  static Block repeat_until_goal(std::vector<Block> body = {}) {
    return Block{BlockKind::RepeatUntilGoal, 0, Condition::PathAhead, std::move(body), {}};
  }
  static Block if_(Condition c, std::vector<Block> body = {}) {
    return Block{BlockKind::If, 0, c, std::move(body), {}};
  }
  static Block if_else(Condition c, std::vector<Block> body = {}, std::vector<Block> else_body = {}) {
    return Block{BlockKind::IfElse, 0, c, std::move(body), std::move(else_body)};
  }

  bool has_body() const { return !is_basic(kind); }
  bool bodies_empty() const { return body.empty() && else_body.empty(); }

  friend bool operator==(const Block&, const Block&) = default;
};

using Sequence = std::vector<Block>;

/// An ordered block program: the student attempt, a recommendation, or a
/// task solution are all values of this type.
struct Program {
  Sequence blocks;

  Program() = default;
  explicit Program(Sequence b) : blocks(std::move(b)) {}

  bool empty() const { return blocks.empty(); }
  /// Number of blocks at every nesting level.
  std::size_t node_count() const;
  /// 0 for the empty program, 1 for a flat sequence, +1 per nesting level.
  std::size_t depth() const;

  friend bool operator==(const Program&, const Program&) = default;
};

std::size_t node_count(const Sequence& seq);

/// Which child sequence of a control block a path step descends into.
enum class Branch : std::uint8_t { Body, Else };

/// Address of one block: a list of (index within sequence, branch taken to
/// reach the next sequence). The branch of the final step is ignored.
struct PathStep {
  std::size_t index = 0;
  Branch branch = Branch::Body;
  friend bool operator==(const PathStep&, const PathStep&) = default;
};
using BlockPath = std::vector<PathStep>;

const Block& block_at(const Program& p, const BlockPath& path);
Block& block_at(Program& p, const BlockPath& path);

/// Canonical DSL text: two-space indent, one block per line.
std::string serialize_program(const Program& p);

/// Compact single-line form, cheaper than the canonical text; used as a hash key.
std::string compact_key(const Program& p);

}  // namespace mm
