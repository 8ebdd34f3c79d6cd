#include "mm/tree/subtrees.hpp"

namespace mm {

namespace {

/// Removes the last block in preorder; returns false if `seq` is empty.
bool drop_last_leaf(Sequence& seq) {
  if (seq.empty()) return false;
  Block& last = seq.back();
  if (drop_last_leaf(last.else_body)) return true;
  if (drop_last_leaf(last.body)) return true;
  seq.pop_back();
  return true;
}

}  // namespace

std::vector<Program> rooted_subtrees(const Program& p) {
  std::vector<Program> out;
  out.reserve(p.node_count() + 1);
  Program cur = p;
  out.push_back(cur);
  while (drop_last_leaf(cur.blocks)) out.push_back(cur);
  return out;
}

bool matches_rooted_subtree(const Program& candidate, const Program& target) {
  if (candidate.node_count() > target.node_count()) return false;
  for (const Program& s : rooted_subtrees(target))
    if (s == candidate) return true;
  return false;
}

RootedSubtreeIndex::RootedSubtreeIndex(const Program& target) : members_(rooted_subtrees(target)) {
  for (const Program& m : members_) keys_.insert(compact_key(m));
}

bool RootedSubtreeIndex::contains(const Program& candidate) const { return keys_.contains(compact_key(candidate)); }

}  // namespace mm
