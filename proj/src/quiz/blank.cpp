#include "mm/quiz/blank.hpp"

#include "mm/core/wire.hpp"

namespace mm {

namespace {

struct Deepest {
  BlockPath path;
  std::size_t depth = 0;
};

void scan(const Sequence& seq, BlockPath& path, Deepest& best) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Block& b = seq[i];
    path.push_back({i, Branch::Body});
    if (is_basic(b.kind)) {
      // >= keeps the later leaf on equal depth.
      if (path.size() >= best.depth) best = {path, path.size()};
    } else {
      scan(b.body, path, best);
      path.back().branch = Branch::Else;
      scan(b.else_body, path, best);
    }
    path.pop_back();
  }
}

bool same_address(const BlockPath& a, const BlockPath& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].index != b[i].index) return false;
    if (i + 1 < a.size() && a[i].branch != b[i].branch) return false;
  }
  return true;
}

void render_seq(std::string& out, const Sequence& seq, int indent, BlockPath& at, const BlockPath& hole);

void render_block(std::string& out, const Block& b, int indent, BlockPath& at, const BlockPath& hole) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (is_basic(b.kind)) {
    out += pad + (same_address(at, hole) ? std::string("___") : std::string(keyword(b.kind))) + "\n";
    return;
  }
  out += pad + std::string(keyword(b.kind));
  if (b.kind == BlockKind::Repeat) out += " " + std::to_string(b.count);
  if (is_conditional(b.kind)) out += " " + std::string(keyword(b.condition));
  out += " {\n";
  at.back().branch = Branch::Body;
  render_seq(out, b.body, indent + 1, at, hole);
  if (b.kind == BlockKind::IfElse) {
    out += pad + "} else {\n";
    at.back().branch = Branch::Else;
    render_seq(out, b.else_body, indent + 1, at, hole);
  }
  out += pad + "}\n";
}

void render_seq(std::string& out, const Sequence& seq, int indent, BlockPath& at, const BlockPath& hole) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    at.push_back({i, Branch::Body});
    render_block(out, seq[i], indent, at, hole);
    at.pop_back();
  }
}

}  // namespace

bool has_basic_action(const Program& p) {
  Deepest best;
  BlockPath path;
  scan(p.blocks, path, best);
  return !best.path.empty();
}

BlankedProgram place_blank(const Program& p) {
  Deepest best;
  BlockPath path;
  scan(p.blocks, path, best);
  if (best.path.empty()) throw Error("cannot place a blank: the program has no basic action");
  return {p, best.path, *action_of(block_at(p, best.path).kind)};
}

Program BlankedProgram::fill(Action a) const {
  Program p = source;
  block_at(p, blank_path) = Block::action(a);
  return p;
}

std::string BlankedProgram::render() const {
  std::string out;
  BlockPath at;
  render_seq(out, source.blocks, 0, at, blank_path);
  return out;
}

nlohmann::json BlankedProgram::to_wire() const {
  nlohmann::json j = mm::to_wire(source);
  nlohmann::json* node = &j;
  for (std::size_t i = 0; i < blank_path.size(); ++i) {
    node = &(*node)[blank_path[i].index];
    if (i + 1 < blank_path.size()) node = &(*node)[blank_path[i].branch == Branch::Body ? "body" : "else_body"];
  }
  *node = {{"kind", "hole"}};
  return j;
}

}  // namespace mm
