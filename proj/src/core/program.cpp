#include "mm/core/program.hpp"

#include <algorithm>

namespace mm {

std::optional<Action> action_of(BlockKind k) {
  switch (k) {
    case BlockKind::Move: return Action::Move;
    case BlockKind::TurnLeft: return Action::TurnLeft;
    case BlockKind::TurnRight: return Action::TurnRight;
    default: return std::nullopt;
  }
}

std::string_view keyword(BlockKind k) {
  switch (k) {
    case BlockKind::Move: return "move";
    case BlockKind::TurnLeft: return "turn_left";
    case BlockKind::TurnRight: return "turn_right";
    case BlockKind::Repeat: return "repeat";
    case BlockKind::RepeatUntilGoal: return "repeat_until_goal";
    case BlockKind::If: return "if";
    case BlockKind::IfElse: return "if_else";
  }
  return "?";
}

std::string_view keyword(Condition c) {
  switch (c) {
    case Condition::PathAhead: return "path_ahead";
    case Condition::PathLeft: return "path_left";
    case Condition::PathRight: return "path_right";
  }
  return "?";
}

std::string_view keyword(Action a) { return keyword(kind_of(a)); }

std::optional<BlockKind> block_kind_from_keyword(std::string_view word) {
  for (BlockKind k : kAllKinds)
    if (keyword(k) == word) return k;
  return std::nullopt;
}

std::optional<Condition> condition_from_keyword(std::string_view word) {
  for (Condition c : kAllConditions)
    if (keyword(c) == word) return c;
  return std::nullopt;
}

std::optional<Action> action_from_keyword(std::string_view word) {
  auto k = block_kind_from_keyword(word);
  return k ? action_of(*k) : std::nullopt;
}

std::size_t node_count(const Sequence& seq) {
  std::size_t n = 0;
  for (const Block& b : seq) n += 1 + node_count(b.body) + node_count(b.else_body);
  return n;
}

std::size_t Program::node_count() const { return mm::node_count(blocks); }

namespace {

std::size_t sequence_depth(const Sequence& seq) {
  std::size_t d = 0;
  for (const Block& b : seq)
    d = std::max({d, std::size_t{1}, 1 + sequence_depth(b.body), 1 + sequence_depth(b.else_body)});
  return d;
}

template <typename P, typename B>
B& walk(P& p, const BlockPath& path) {
  if (path.empty()) throw Error("empty block path");
  auto* seq = &p.blocks;
  for (std::size_t i = 0;; ++i) {
    if (path[i].index >= seq->size()) throw Error("block path out of range");
    B& b = (*seq)[path[i].index];
    if (i + 1 == path.size()) return b;
    seq = path[i].branch == Branch::Body ? &b.body : &b.else_body;
  }
}

void write_block(std::string& out, const Block& b, int indent);

void write_sequence(std::string& out, const Sequence& seq, int indent) {
  for (const Block& b : seq) write_block(out, b, indent);
}

void write_block(std::string& out, const Block& b, int indent) {
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += keyword(b.kind);
  if (is_basic(b.kind)) {
    out += '\n';
    return;
  }
  if (b.kind == BlockKind::Repeat) {
    out += ' ';
    out += std::to_string(b.count);
  } else if (is_conditional(b.kind)) {
    out += ' ';
    out += keyword(b.condition);
  }
  out += " {\n";
  write_sequence(out, b.body, indent + 1);
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  if (b.kind == BlockKind::IfElse) {
    out += "} else {\n";
    write_sequence(out, b.else_body, indent + 1);
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
  }
  out += "}\n";
}

void compact(std::string& out, const Sequence& seq) {
  for (const Block& b : seq) {
    switch (b.kind) {
      case BlockKind::Move: out += 'M'; break;
      case BlockKind::TurnLeft: out += 'L'; break;
      case BlockKind::TurnRight: out += 'R'; break;
      case BlockKind::Repeat:
        out += 'r';
        out += std::to_string(b.count);
        break;
      case BlockKind::RepeatUntilGoal: out += 'u'; break;
      case BlockKind::If: out += 'i'; break;
      case BlockKind::IfElse: out += 'e'; break;
    }
    if (!b.has_body()) continue;
    if (is_conditional(b.kind)) out += static_cast<char>('a' + static_cast<int>(b.condition));
    out += '{';
    compact(out, b.body);
    if (b.kind == BlockKind::IfElse) {
      out += '|';
      compact(out, b.else_body);
    }
    out += '}';
  }
}

}  // namespace

std::size_t Program::depth() const { return sequence_depth(blocks); }

const Block& block_at(const Program& p, const BlockPath& path) {
  return walk<const Program, const Block>(p, path);
}
Block& block_at(Program& p, const BlockPath& path) { return walk<Program, Block>(p, path); }

std::string serialize_program(const Program& p) {
  std::string out;
  write_sequence(out, p.blocks, 0);
  return out;
}

std::string compact_key(const Program& p) {
  std::string out;
  out.reserve(p.blocks.size() * 3);
  compact(out, p.blocks);
  return out;
}

}  // namespace mm
