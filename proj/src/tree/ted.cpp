#include "mm/tree/ted.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace mm {

std::size_t LabeledTree::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::int64_t block_label(const Block& b) {
  // kind in the low 4 bits, condition next, then the repeat count.
  std::int64_t label = static_cast<std::int64_t>(b.kind);
  if (is_conditional(b.kind)) label |= static_cast<std::int64_t>(b.condition) << 4;
  if (b.kind == BlockKind::Repeat) label |= static_cast<std::int64_t>(static_cast<std::uint32_t>(b.count)) << 8;
  return label;
}

namespace {

void append_children(const Sequence& seq, std::vector<LabeledTree>& out) {
  for (const Block& b : seq) {
    LabeledTree node{block_label(b), {}};
    append_children(b.body, node.children);
    if (b.kind == BlockKind::IfElse) {
      LabeledTree else_node{kElseLabel, {}};
      append_children(b.else_body, else_node.children);
      node.children.push_back(std::move(else_node));
    }
    out.push_back(std::move(node));
  }
}

/// Postorder view of a tree: labels, leftmost-leaf indices and keyroots,
/// 1-based as in the original formulation.
struct Postorder {
  std::vector<std::int64_t> label{0};
  std::vector<int> leftmost{0};
  std::vector<int> preorder{0};  // preorder id of each postorder node
  std::vector<int> keyroots;

  explicit Postorder(const LabeledTree& t) {
    int pre = 0;
    visit(t, pre);
    std::map<int, int> highest;  // leftmost leaf -> highest node with it
    for (int i = 1; i < static_cast<int>(label.size()); ++i) highest[leftmost[static_cast<std::size_t>(i)]] = i;
    for (auto& [l, i] : highest) keyroots.push_back(i);
    std::sort(keyroots.begin(), keyroots.end());
  }

  int size() const { return static_cast<int>(label.size()) - 1; }
  int l(int i) const { return leftmost[static_cast<std::size_t>(i)]; }

 private:
  int visit(const LabeledTree& t, int& pre) {
    const int my_pre = pre++;
    int first = -1;
    for (const auto& c : t.children) {
      int idx = visit(c, pre);
      if (first < 0) first = leftmost[static_cast<std::size_t>(idx)];
    }
    label.push_back(t.label);
    preorder.push_back(my_pre);
    const int me = static_cast<int>(label.size()) - 1;
    leftmost.push_back(first < 0 ? me : first);
    return me;
  }
};

class ZhangShasha {
 public:
  ZhangShasha(const LabeledTree& a, const LabeledTree& b)
      : a_(a), b_(b), n_(a_.size()), m_(b_.size()),
        td_(static_cast<std::size_t>((n_ + 1) * (m_ + 1)), 0),
        fd_(static_cast<std::size_t>((n_ + 1) * (m_ + 1)), 0) {
    for (int i : a_.keyroots)
      for (int j : b_.keyroots) forest(i, j);
  }

  int distance() const { return td(n_, m_); }

  /// Optimal mapping as (source preorder id, target preorder id) pairs.
  std::vector<std::pair<int, int>> mapping() {
    std::vector<std::pair<int, int>> out;
    backtrack(n_, m_, out);
    return out;
  }

 private:
  int& td(int i, int j) { return td_[static_cast<std::size_t>(i * (m_ + 1) + j)]; }
  int td(int i, int j) const { return td_[static_cast<std::size_t>(i * (m_ + 1) + j)]; }
  int& fd(int i, int j) { return fd_[static_cast<std::size_t>(i * (m_ + 1) + j)]; }

  int relabel_cost(int i, int j) const {
    return a_.label[static_cast<std::size_t>(i)] == b_.label[static_cast<std::size_t>(j)] ? 0 : 1;
  }

  /// Fills the forest table for the subtree pair (ki, kj) and records the
  /// tree distances of every pair on their leftmost paths.
  void forest(int ki, int kj) {
    const int li = a_.l(ki), lj = b_.l(kj);
    fd(li - 1, lj - 1) = 0;
    for (int i = li; i <= ki; ++i) fd(i, lj - 1) = fd(i - 1, lj - 1) + 1;
    for (int j = lj; j <= kj; ++j) fd(li - 1, j) = fd(li - 1, j - 1) + 1;
    for (int i = li; i <= ki; ++i) {
      for (int j = lj; j <= kj; ++j) {
        const int del = fd(i - 1, j) + 1;
        const int ins = fd(i, j - 1) + 1;
        if (a_.l(i) == li && b_.l(j) == lj) {
          fd(i, j) = std::min({del, ins, fd(i - 1, j - 1) + relabel_cost(i, j)});
          td(i, j) = fd(i, j);
        } else {
          fd(i, j) = std::min({del, ins, fd(a_.l(i) - 1, b_.l(j) - 1) + td(i, j)});
        }
      }
    }
  }

  void backtrack(int ki, int kj, std::vector<std::pair<int, int>>& out) {
    forest(ki, kj);
    const int li = a_.l(ki), lj = b_.l(kj);
    // Subtree tables get overwritten by the recursion, so decide the path
    // first and recurse afterwards.
    std::vector<std::pair<int, int>> nested;
    int i = ki, j = kj;
    while (i >= li || j >= lj) {
      if (i >= li && j >= lj) {
        if (a_.l(i) == li && b_.l(j) == lj) {
          if (fd(i, j) == fd(i - 1, j - 1) + relabel_cost(i, j)) {
            out.emplace_back(a_.preorder[static_cast<std::size_t>(i)], b_.preorder[static_cast<std::size_t>(j)]);
            --i;
            --j;
            continue;
          }
        } else if (fd(i, j) == fd(a_.l(i) - 1, b_.l(j) - 1) + td(i, j)) {
          nested.emplace_back(i, j);
          const int ni = a_.l(i) - 1;
          j = b_.l(j) - 1;
          i = ni;
          continue;
        }
      }
      if (i >= li && fd(i, j) == fd(i - 1, j) + 1) {
        --i;
      } else {
        --j;
      }
    }
    for (auto [x, y] : nested) backtrack(x, y, out);
  }

  Postorder a_, b_;
  int n_, m_;
  std::vector<int> td_, fd_;
};

/// Mutable tree with stable ids, used to replay edit scripts.
struct WorkTree {
  struct Node {
    std::int64_t label = 0;
    int parent = -1;
    std::vector<int> children;
    bool alive = true;
  };
  std::map<int, Node> nodes;
  std::vector<int> roots;

  explicit WorkTree(const LabeledTree& t) {
    int next = 0;
    roots.push_back(add(t, -1, next));
  }

  int add(const LabeledTree& t, int parent, int& next) {
    const int id = next++;
    nodes[id] = Node{t.label, parent, {}, true};
    for (const auto& c : t.children) {
      int cid = add(c, id, next);
      nodes[id].children.push_back(cid);
    }
    return id;
  }

  std::vector<int>& kids(int parent) { return parent < 0 ? roots : nodes.at(parent).children; }

  void apply(const Edit& e) {
    if (const auto* r = std::get_if<Relabel>(&e)) {
      nodes.at(r->node).label = r->label;
    } else if (const auto* d = std::get_if<Delete>(&e)) {
      Node& n = nodes.at(d->node);
      auto& siblings = kids(n.parent);
      auto it = std::find(siblings.begin(), siblings.end(), d->node);
      if (it == siblings.end()) throw Error("edit script deletes a detached node");
      for (int c : n.children) nodes.at(c).parent = n.parent;
      it = siblings.erase(it);
      siblings.insert(it, n.children.begin(), n.children.end());
      n.children.clear();
      n.alive = false;
    } else {
      const auto& ins = std::get<Insert>(e);
      if (ins.parent >= 0 && !nodes.contains(ins.parent)) throw Error("edit script inserts under an unknown node");
      auto& siblings = kids(ins.parent);
      if (ins.position < 0 || ins.adopt < 0 ||
          static_cast<std::size_t>(ins.position + ins.adopt) > siblings.size())
        throw Error("edit script insert position out of range");
      Node n{ins.label, ins.parent, {}, true};
      auto first = siblings.begin() + ins.position;
      n.children.assign(first, first + ins.adopt);
      for (int c : n.children) nodes.at(c).parent = ins.node;
      auto it = siblings.erase(first, first + ins.adopt);
      siblings.insert(it, ins.node);
      nodes[ins.node] = std::move(n);
    }
  }

  LabeledTree build(int id) const {
    const Node& n = nodes.at(id);
    LabeledTree t{n.label, {}};
    for (int c : n.children) t.children.push_back(build(c));
    return t;
  }

  LabeledTree result() const {
    if (roots.size() != 1) throw Error("edit script does not leave exactly one root");
    return build(roots.front());
  }
};

struct PreorderInfo {
  std::vector<std::int64_t> label;
  std::vector<int> parent;
  std::vector<int> size;

  explicit PreorderInfo(const LabeledTree& t) { visit(t, -1); }

  int visit(const LabeledTree& t, int parent_id) {
    const int id = static_cast<int>(label.size());
    label.push_back(t.label);
    parent.push_back(parent_id);
    size.push_back(1);
    for (const auto& c : t.children) size[static_cast<std::size_t>(id)] += size[static_cast<std::size_t>(visit(c, id))];
    return id;
  }
};

}  // namespace

LabeledTree to_labeled_tree(const Program& p) {
  LabeledTree root{kProgramRootLabel, {}};
  append_children(p.blocks, root.children);
  return root;
}

int tree_edit_distance(const LabeledTree& a, const LabeledTree& b) { return ZhangShasha(a, b).distance(); }

int ted(const Program& a, const Program& b) { return tree_edit_distance(to_labeled_tree(a), to_labeled_tree(b)); }

EditScript edit_script(const LabeledTree& a, const LabeledTree& b) {
  ZhangShasha zs(a, b);
  const auto pairs = zs.mapping();
  const PreorderInfo src(a), dst(b);
  const int n = static_cast<int>(src.label.size()), m = static_cast<int>(dst.label.size());
  std::vector<int> src_to_dst(static_cast<std::size_t>(n), -1), dst_to_src(static_cast<std::size_t>(m), -1);
  for (auto [s, d] : pairs) {
    src_to_dst[static_cast<std::size_t>(s)] = d;
    dst_to_src[static_cast<std::size_t>(d)] = s;
  }

  EditScript script;
  WorkTree work(a);
  auto emit = [&](Edit e) {
    work.apply(e);
    script.edits.push_back(std::move(e));
  };
  for (auto [s, d] : pairs)
    if (src.label[static_cast<std::size_t>(s)] != dst.label[static_cast<std::size_t>(d)])
      emit(Relabel{s, dst.label[static_cast<std::size_t>(d)]});
  for (int s = 0; s < n; ++s)
    if (src_to_dst[static_cast<std::size_t>(s)] < 0) emit(Delete{s});

  // The remaining tree is the target restricted to mapped nodes; insert the
  // missing target nodes in preorder so each parent exists first.
  std::vector<int> id_of(static_cast<std::size_t>(m), -1);  // target node -> work id
  std::map<int, int> target_of;                             // work id -> target node
  for (int d = 0; d < m; ++d)
    if (int s = dst_to_src[static_cast<std::size_t>(d)]; s >= 0) {
      id_of[static_cast<std::size_t>(d)] = s;
      target_of[s] = d;
    }
  int next_id = n;
  for (int d = 0; d < m; ++d) {
    if (id_of[static_cast<std::size_t>(d)] >= 0) continue;
    const int tp = dst.parent[static_cast<std::size_t>(d)];
    const int parent = tp < 0 ? -1 : id_of[static_cast<std::size_t>(tp)];
    const auto& siblings = work.kids(parent);
    const int lo = d, hi = d + dst.size[static_cast<std::size_t>(d)];
    int position = 0, adopt = 0;
    for (int c : siblings) {
      const int t = target_of.at(c);
      if (t < lo) ++position;
      else if (t < hi) ++adopt;
    }
    const int id = next_id++;
    id_of[static_cast<std::size_t>(d)] = id;
    target_of[id] = d;
    emit(Insert{id, dst.label[static_cast<std::size_t>(d)], parent, position, adopt});
  }
  return script;
}

LabeledTree apply_edit_script(const LabeledTree& source, const EditScript& script) {
  WorkTree work(source);
  for (const Edit& e : script.edits) work.apply(e);
  return work.result();
}

}  // namespace mm
