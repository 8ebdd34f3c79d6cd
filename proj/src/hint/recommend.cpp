#include "mm/hint/recommend.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "mm/core/wire.hpp"
#include "mm/tree/neighborhood.hpp"
#include "mm/tree/subtrees.hpp"
#include "mm/tree/ted.hpp"

namespace mm {

namespace {

using Histogram = std::vector<std::int64_t>;

void collect_labels(const Sequence& seq, Histogram& out) {
  for (const Block& b : seq) {
    out.push_back(block_label(b));
    collect_labels(b.body, out);
    collect_labels(b.else_body, out);
  }
}

Histogram histogram(const Program& p) {
  Histogram h;
  collect_labels(p.blocks, h);
  std::sort(h.begin(), h.end());
  return h;
}

/// Lower bound on neighborhood steps between two programs: one step adds at
/// most one block label and removes at most one.
std::size_t step_bound(const Histogram& a, const Histogram& b) {
  std::size_t only_a = 0, only_b = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++only_a;
      ++i;
    } else {
      ++only_b;
      ++j;
    }
  }
  only_a += a.size() - i;
  only_b += b.size() - j;
  return std::max(only_a, only_b);
}

struct Target {
  Program program;
  std::string key;
  Histogram labels;
  int distance;  // ted to c_star
};

auto rank(const Program& p, int distance) {
  return std::make_tuple(distance, p.node_count(), serialize_program(p));
}

}  // namespace

Recommendation recommend(const Program& c_stu, const Program& c_star, const Palette& palette, HintLimits limits) {
  if (c_stu == c_star) return {c_star, 0, 0, false};
  const int d0 = ted(c_stu, c_star);

  std::vector<Target> targets;
  std::unordered_map<std::string, std::size_t> by_key;
  for (Program& r : rooted_subtrees(c_star)) {
    const int d = ted(r, c_star);
    if (d >= d0) continue;
    by_key.emplace(compact_key(r), targets.size());
    targets.push_back({r, compact_key(r), histogram(r), d});
  }

  auto hopeful = [&](const Program& p, std::size_t steps_left) {
    const Histogram h = histogram(p);
    for (const Target& t : targets)
      if (step_bound(h, t.labels) <= steps_left) return true;
    return false;
  };

  std::unordered_set<std::string> seen{compact_key(c_stu)};
  std::vector<Program> frontier{c_stu};
  const std::size_t depth = limits.max_depth;
  for (std::size_t layer = 1; layer <= depth && !frontier.empty(); ++layer) {
    const std::size_t left = depth - layer;
    std::size_t best = targets.size();
    std::vector<std::pair<std::size_t, Program>> next;  // (bound rank, program)
    for (const Program& x : frontier) {
      for_each_neighbor(x, palette, [&](Program&& q) {
        std::string key = compact_key(q);
        if (!seen.insert(key).second) return;
        if (auto it = by_key.find(key); it != by_key.end()) {
          if (best == targets.size() || targets[it->second].distance < targets[best].distance) best = it->second;
        }
        if (left > 0 && hopeful(q, left)) next.emplace_back(q.node_count(), std::move(q));
      });
    }
    if (best != targets.size()) {
      const Target& t = targets[best];
      return {t.program, t.distance, static_cast<int>(layer), false};
    }
    if (next.size() > limits.max_members) {
      std::vector<std::pair<std::string, std::size_t>> order;
      order.reserve(next.size());
      for (std::size_t i = 0; i < next.size(); ++i) order.emplace_back(compact_key(next[i].second), i);
      std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        return std::tie(next[a.second].first, a.first) < std::tie(next[b.second].first, b.first);
      });
      order.resize(limits.max_members);
      std::vector<std::pair<std::size_t, Program>> kept;
      kept.reserve(order.size());
      for (const auto& o : order) kept.push_back(std::move(next[o.second]));
      next = std::move(kept);
    }
    frontier.clear();
    for (auto& [n, p] : next) frontier.push_back(std::move(p));
  }

  const Target* pick = nullptr;
  int pick_d = 0;
  for (const Target& t : targets) {
    const int d = ted(t.program, c_stu);
    if (!pick || rank(t.program, d) < rank(pick->program, pick_d)) {
      pick = &t;
      pick_d = d;
    }
  }
  // Progress targets always include the empty program unless c_stu is empty,
  // and then c_star itself qualifies, so pick is set.
  return {pick->program, pick->distance, static_cast<int>(depth), true};
}

std::string_view keyword(HintChoice c) { return c == HintChoice::KeepMyCode ? "keep_my_code" : "use_new_code"; }

RecommendationPayload render_recommendation(const Recommendation& r, const Program& c_stu) {
  return {c_stu, r, {HintChoice::KeepMyCode, HintChoice::UseNewCode}};
}

nlohmann::json to_json(const RecommendationPayload& p) {
  nlohmann::json actions = nlohmann::json::array();
  for (HintChoice c : p.actions) actions.push_back(keyword(c));
  return {
      {"current", {{"ast", to_wire(p.current)}, {"text", serialize_program(p.current)}}},
      {"recommended",
       {{"ast", to_wire(p.recommendation.c_rec)}, {"text", serialize_program(p.recommendation.c_rec)}}},
      {"distance_to_solution", p.recommendation.distance_to_solution},
      {"layers_explored", p.recommendation.layers_explored},
      {"via_fallback", p.recommendation.via_fallback},
      {"actions", actions},
  };
}

Program apply_choice(const RecommendationPayload& p, HintChoice choice) {
  return choice == HintChoice::UseNewCode ? p.recommendation.c_rec : p.current;
}

}  // namespace mm
