#pragma once

#include <cstddef>
#include <vector>

#include "mm/core/grid.hpp"
#include "mm/quiz/blank.hpp"

namespace mm {

struct GridSynthesisBounds {
  int max_side = 8;
  std::size_t max_candidates = 32;
  int max_steps = 80;             // basic actions along one symbolic path
  std::size_t max_states = 60000; // symbolic states explored in total
};

class GridSynthesisError : public Error {
 public:
  using Error::Error;
};

/// Exactly one of the three fills of `b` reaches the goal on `g`, and it is
/// the correct one.
bool is_discriminating(const BlankedProgram& b, const TaskGrid& g);

/// Grids, found by symbolic execution of the correctly filled program, on
/// which the blank is discriminating. Ordered by fewer free cells, then more
/// distinct branch outcomes taken, then canonical text. Throws
/// GridSynthesisError when none is found within `bounds`.
std::vector<TaskGrid> synthesize_quiz_grids(const BlankedProgram& b, GridSynthesisBounds bounds = {});

}  // namespace mm
