#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "mm/core/program.hpp"
#include "mm/core/task.hpp"

namespace mm {

struct HintLimits {
  std::size_t max_depth = 3;
  /// Cap on the programs of one BFS layer that are expanded further. Every
  /// generated program is still checked for overlap.
  std::size_t max_members = 5000;
};

struct Recommendation {
  Program c_rec;
  int distance_to_solution = 0;
  int layers_explored = 0;
  bool via_fallback = false;

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

/// Code-Rec: breadth-first search over neighborhood layers of `c_stu` for a
/// rooted subtree of `c_star` that is strictly closer to `c_star` than
/// `c_stu` is. The first layer holding such a program wins; among its hits the
/// one nearest to `c_star` is returned (ties: fewer blocks, then canonical
/// text). When no layer up to `max_depth` hits, the closest-to-`c_stu` rooted
/// subtree with the same progress property is returned instead.
Recommendation recommend(const Program& c_stu, const Program& c_star, const Palette& palette,
                         HintLimits limits = {});

enum class HintChoice { KeepMyCode, UseNewCode };

std::string_view keyword(HintChoice c);

/// Intervention payload shown to the student.
struct RecommendationPayload {
  Program current;
  Recommendation recommendation;
  std::vector<HintChoice> actions;
};

RecommendationPayload render_recommendation(const Recommendation& r, const Program& c_stu);

/// {current, recommended: {ast, text}, distance_to_solution, layers_explored, via_fallback, actions}
nlohmann::json to_json(const RecommendationPayload& p);

/// The working program after the student picks `choice`.
Program apply_choice(const RecommendationPayload& p, HintChoice choice);

}  // namespace mm
