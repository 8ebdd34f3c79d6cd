#pragma once

#include <random>

#include "mm/core/program.hpp"

namespace mm::testing {

/// Random programs with bounded depth and node count. Repeat counts stay in
/// the palette range and bodies may be empty.
class ProgramGenerator {
 public:
  explicit ProgramGenerator(std::uint64_t seed, std::size_t max_depth = 4, std::size_t max_nodes = 20)
      : rng_(seed), max_depth_(max_depth), max_nodes_(max_nodes) {}

  Program next() {
    budget_ = std::uniform_int_distribution<std::size_t>(0, max_nodes_)(rng_);
    return Program(sequence(1));
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  Sequence sequence(std::size_t depth) {
    Sequence seq;
    std::uniform_int_distribution<int> len(0, 4);
    int n = len(rng_);
    for (int i = 0; i < n && budget_ > 0; ++i) seq.push_back(block(depth));
    return seq;
  }

  Block block(std::size_t depth) {
    --budget_;
    std::uniform_int_distribution<int> pick(0, depth < max_depth_ ? 6 : 2);
    std::uniform_int_distribution<int> cond(0, 2);
    switch (pick(rng_)) {
      case 0: return Block::move();
      case 1: return Block::turn_left();
      case 2: return Block::turn_right();
      case 3: return Block::repeat(std::uniform_int_distribution<int>(2, 9)(rng_), sequence(depth + 1));
      case 4: return Block::repeat_until_goal(sequence(depth + 1));
      case 5: return Block::if_(static_cast<Condition>(cond(rng_)), sequence(depth + 1));
      default: {
        Condition c = static_cast<Condition>(cond(rng_));
        Sequence then_body = sequence(depth + 1);
        return Block::if_else(c, std::move(then_body), sequence(depth + 1));
      }
    }
  }

  std::mt19937_64 rng_;
  std::size_t max_depth_;
  std::size_t max_nodes_;
  std::size_t budget_ = 0;
};

}  // namespace mm::testing
