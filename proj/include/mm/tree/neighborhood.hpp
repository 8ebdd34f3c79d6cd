#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "mm/core/program.hpp"
#include "mm/core/task.hpp"

namespace mm {

struct NeighborhoodLimits {
  std::size_t max_members = 5000;
};

/// N(p): programs one structural edit away from `origin`, deduplicated,
/// ordered by canonical text and truncated to the member cap.
struct Neighborhood {
  Program origin;
  std::vector<Program> members;
};

/// Visits every single-edit variant of `p`, duplicates included and `p`
/// itself excluded. The edit set:
///  - insert a basic action at any sequence position
///  - delete a block whose bodies are empty
///  - delete a control block by splicing its bodies in place
///  - replace a basic action by another
///  - change a repeat count by one within 2..9
///  - change an if/if_else condition
///  - wrap a contiguous (possibly empty) run of blocks in a palette control
///    block: repeat 2, repeat_until_goal, if or if_else with an empty else
void for_each_neighbor(const Program& p, const Palette& palette,
                       const std::function<void(Program&&)>& visit);

Neighborhood neighborhood(const Program& p, const Palette& palette, NeighborhoodLimits limits = {});

/// Applies `edits` random single edits (inverse edits when `p` is a
/// solution). Each step draws uniformly from the deduplicated neighborhood.
Program corrupt(const Program& p, const Palette& palette, int edits, std::mt19937_64& rng);

}  // namespace mm
