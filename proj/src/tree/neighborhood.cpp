#include "mm/tree/neighborhood.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

namespace mm {

namespace {

/// Locates a sequence inside a program: each step names a block and the
/// branch to descend into.
using SequencePath = std::vector<PathStep>;

Sequence& sequence_at(Program& p, const SequencePath& path) {
  Sequence* seq = &p.blocks;
  for (const PathStep& s : path) {
    Block& b = (*seq)[s.index];
    seq = s.branch == Branch::Body ? &b.body : &b.else_body;
  }
  return *seq;
}

void collect_sequences(const Sequence& seq, SequencePath& path, std::vector<SequencePath>& out) {
  out.push_back(path);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Block& b = seq[i];
    if (!b.has_body()) continue;
    path.push_back({i, Branch::Body});
    collect_sequences(b.body, path, out);
    path.pop_back();
    if (b.kind == BlockKind::IfElse) {
      path.push_back({i, Branch::Else});
      collect_sequences(b.else_body, path, out);
      path.pop_back();
    }
  }
}

std::vector<Block> wrappers(const Palette& palette) {
  std::vector<Block> out;
  if (palette.allows(BlockKind::Repeat)) out.push_back(Block::repeat(kMinRepeatCount));
  if (palette.allows(BlockKind::RepeatUntilGoal)) out.push_back(Block::repeat_until_goal());
  if (palette.allows(BlockKind::If))
    for (Condition c : kAllConditions) out.push_back(Block::if_(c));
  if (palette.allows(BlockKind::IfElse))
    for (Condition c : kAllConditions) out.push_back(Block::if_else(c));
  return out;
}

}  // namespace

void for_each_neighbor(const Program& p, const Palette& palette, const std::function<void(Program&&)>& visit) {
  std::vector<SequencePath> seqs;
  SequencePath scratch;
  collect_sequences(p.blocks, scratch, seqs);
  const std::vector<Block> wraps = wrappers(palette);

  auto variant = [&](const SequencePath& path, auto&& mutate) {
    Program q = p;
    mutate(sequence_at(q, path));
    visit(std::move(q));
  };

  for (const SequencePath& path : seqs) {
    Program probe = p;
    const std::size_t n = sequence_at(probe, path).size();
    const Sequence& seq = sequence_at(probe, path);

    for (std::size_t pos = 0; pos <= n; ++pos)
      for (Action a : kAllActions)
        variant(path, [&](Sequence& s) { s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), Block::action(a)); });

    for (std::size_t i = 0; i < n; ++i) {
      const Block& b = seq[i];
      if (b.bodies_empty()) {
        variant(path, [&](Sequence& s) { s.erase(s.begin() + static_cast<std::ptrdiff_t>(i)); });
      } else {
        variant(path, [&](Sequence& s) {
          Block ctl = std::move(s[i]);
          Sequence spliced = std::move(ctl.body);
          spliced.insert(spliced.end(), std::make_move_iterator(ctl.else_body.begin()),
                         std::make_move_iterator(ctl.else_body.end()));
          auto it = s.erase(s.begin() + static_cast<std::ptrdiff_t>(i));
          s.insert(it, std::make_move_iterator(spliced.begin()), std::make_move_iterator(spliced.end()));
        });
      }
      if (auto act = action_of(b.kind)) {
        for (Action a : kAllActions)
          if (a != *act) variant(path, [&](Sequence& s) { s[i] = Block::action(a); });
      } else if (b.kind == BlockKind::Repeat) {
        for (int delta : {-1, 1}) {
          const int c = b.count + delta;
          if (c >= kMinRepeatCount && c <= kMaxRepeatCount)
            variant(path, [&](Sequence& s) { s[i].count = c; });
        }
      } else if (is_conditional(b.kind)) {
        for (Condition c : kAllConditions)
          if (c != b.condition) variant(path, [&](Sequence& s) { s[i].condition = c; });
      }
    }

    for (std::size_t lo = 0; lo <= n; ++lo)
      for (std::size_t hi = lo; hi <= n; ++hi)
        for (const Block& w : wraps)
          variant(path, [&](Sequence& s) {
            Block ctl = w;
            auto first = s.begin() + static_cast<std::ptrdiff_t>(lo);
            auto last = s.begin() + static_cast<std::ptrdiff_t>(hi);
            ctl.body.assign(std::make_move_iterator(first), std::make_move_iterator(last));
            auto it = s.erase(first, last);
            s.insert(it, std::move(ctl));
          });
  }
}

Neighborhood neighborhood(const Program& p, const Palette& palette, NeighborhoodLimits limits) {
  std::unordered_set<std::string> seen{compact_key(p)};
  std::vector<Program> members;
  for_each_neighbor(p, palette, [&](Program&& q) {
    if (seen.insert(compact_key(q)).second) members.push_back(std::move(q));
  });
  std::vector<std::pair<std::string, Program>> keyed;
  keyed.reserve(members.size());
  for (auto& m : members) keyed.emplace_back(serialize_program(m), std::move(m));
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  if (keyed.size() > limits.max_members) keyed.resize(limits.max_members);
  Neighborhood out{p, {}};
  out.members.reserve(keyed.size());
  for (auto& [text, prog] : keyed) out.members.push_back(std::move(prog));
  return out;
}

Program corrupt(const Program& p, const Palette& palette, int edits, std::mt19937_64& rng) {
  Program cur = p;
  for (int k = 0; k < edits; ++k) {
    Neighborhood nb = neighborhood(cur, palette, {std::numeric_limits<std::size_t>::max()});
    if (nb.members.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, nb.members.size() - 1);
    cur = std::move(nb.members[pick(rng)]);
  }
  return cur;
}

}  // namespace mm
