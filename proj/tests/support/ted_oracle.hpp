#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "mm/tree/ted.hpp"

namespace mm::testing {

/// Edit distance by exhaustive search over every ordered edit mapping
/// (one-to-one, preserving preorder and ancestry). Exponential; small trees only.
class MappingOracle {
 public:
  static int distance(const LabeledTree& a, const LabeledTree& b) {
    Flat fa(a), fb(b);
    const int na = static_cast<int>(fa.labels.size());
    const int nb = static_cast<int>(fb.labels.size());
    int best = na + nb;
    std::vector<std::pair<int, int>> mapping;
    std::function<void(int, int)> search = [&](int i, int min_j) {
      if (i == na) {
        int cost = na + nb - 2 * static_cast<int>(mapping.size());
        for (auto [x, y] : mapping) cost += fa.labels[x] != fb.labels[y];
        best = std::min(best, cost);
        return;
      }
      search(i + 1, min_j);
      for (int j = min_j; j < nb; ++j) {
        bool ok = true;
        for (auto [x, y] : mapping)
          if (fa.ancestor(x, i) != fb.ancestor(y, j)) {
            ok = false;
            break;
          }
        if (!ok) continue;
        mapping.emplace_back(i, j);
        search(i + 1, j + 1);
        mapping.pop_back();
      }
    };
    search(0, 0);
    return best;
  }

 private:
  struct Flat {
    std::vector<std::int64_t> labels;
    std::vector<int> end;  // one past the last preorder index of the subtree
    explicit Flat(const LabeledTree& t) { visit(t); }
    int visit(const LabeledTree& t) {
      int id = static_cast<int>(labels.size());
      labels.push_back(t.label);
      end.push_back(0);
      for (const auto& c : t.children) visit(c);
      end[id] = static_cast<int>(labels.size());
      return id;
    }
    bool ancestor(int x, int y) const { return x < y && y < end[x]; }
  };
};

/// All ordered trees with `n` nodes, labels drawn from `labels`.
inline std::vector<LabeledTree> all_trees(int n, const std::vector<std::int64_t>& labels) {
  std::function<std::vector<std::vector<LabeledTree>>(int)> forests = [&](int m) {
    std::vector<std::vector<LabeledTree>> out;
    if (m == 0) {
      out.emplace_back();
      return out;
    }
    for (int first = 1; first <= m; ++first)
      for (const auto& head : all_trees(first, labels))
        for (auto& rest : forests(m - first)) {
          rest.insert(rest.begin(), head);
          out.push_back(std::move(rest));
        }
    return out;
  };
  std::vector<LabeledTree> out;
  if (n <= 0) return out;
  for (auto& f : forests(n - 1))
    for (auto l : labels) out.push_back(LabeledTree{l, f});
  return out;
}

inline std::vector<LabeledTree> all_trees_up_to(int n, const std::vector<std::int64_t>& labels) {
  std::vector<LabeledTree> out;
  for (int k = 1; k <= n; ++k) {
    auto part = all_trees(k, labels);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace mm::testing
