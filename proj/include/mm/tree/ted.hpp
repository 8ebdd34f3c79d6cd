#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "mm/core/program.hpp"

namespace mm {

/// An ordered tree with integer labels; the common currency of the edit
/// distance routines.
struct LabeledTree {
  std::int64_t label = 0;
  std::vector<LabeledTree> children;

  std::size_t size() const;
  friend bool operator==(const LabeledTree&, const LabeledTree&) = default;
};

/// Program trees have a virtual root carrying `kProgramRootLabel`. An
/// if_else block keeps its then-body as direct children followed by one
/// `kElseLabel` child that holds the else-body, so that moving blocks across
/// the two branches is a visible change.
inline constexpr std::int64_t kProgramRootLabel = -1;
inline constexpr std::int64_t kElseLabel = -2;

std::int64_t block_label(const Block& b);
LabeledTree to_labeled_tree(const Program& p);

/// Zhang-Shasha ordered tree edit distance with unit insert/delete/relabel costs.
int tree_edit_distance(const LabeledTree& a, const LabeledTree& b);
int ted(const Program& a, const Program& b);

/// Nodes are named by ids: source nodes by their preorder index, inserted
/// nodes by ids handed out from source.size() upwards.
struct Relabel {
  int node;
  std::int64_t label;
};
struct Delete {
  int node;  // children move up into the parent at the node's position
};
struct Insert {
  int node;
  std::int64_t label;
  int parent;    // -1 for a new tree root
  int position;  // index among the parent's children
  int adopt;     // number of consecutive children starting at `position` moved under the new node
};
using Edit = std::variant<Relabel, Delete, Insert>;

struct EditScript {
  std::vector<Edit> edits;
  int cost() const { return static_cast<int>(edits.size()); }
};

/// A minimum-cost script: its cost equals tree_edit_distance(a, b).
EditScript edit_script(const LabeledTree& a, const LabeledTree& b);
LabeledTree apply_edit_script(const LabeledTree& source, const EditScript& script);

}  // namespace mm
