#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "mm/core/program.hpp"

namespace mm {

/// Programs obtained by repeatedly deleting the rightmost leaf block (the
/// last block in preorder; a control block goes once its bodies are empty).
/// Ordered from `p` itself down to the empty program, so |result| = |p| + 1.
std::vector<Program> rooted_subtrees(const Program& p);

/// True iff `candidate` equals some member of rooted_subtrees(target).
bool matches_rooted_subtree(const Program& candidate, const Program& target);

/// Precomputed membership test for repeated queries against one target.
class RootedSubtreeIndex {
 public:
  explicit RootedSubtreeIndex(const Program& target);
  bool contains(const Program& candidate) const;
  bool contains_key(const std::string& compact) const { return keys_.contains(compact); }
  const std::vector<Program>& members() const { return members_; }

 private:
  std::vector<Program> members_;
  std::unordered_set<std::string> keys_;
};

}  // namespace mm
