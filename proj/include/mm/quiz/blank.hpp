#pragma once

#include <string>

#include "json.hpp"
#include "mm/core/program.hpp"

namespace mm {

/// A program with one basic-action leaf turned into a hole.
struct BlankedProgram {
  Program source;  // the program with the correct action still in place
  BlockPath blank_path;
  Action correct_action = Action::Move;

  Program fill(Action a) const;
  /// Canonical text with the hole written as "___".
  std::string render() const;
  /// Wire AST with the hole as {"kind": "hole"}.
  nlohmann::json to_wire() const;
};

/// Blanks the deepest basic action, the rightmost one among equals in
/// left-to-right leaf order. Throws Error when `p` has no basic action.
BlankedProgram place_blank(const Program& p);

bool has_basic_action(const Program& p);

}  // namespace mm
