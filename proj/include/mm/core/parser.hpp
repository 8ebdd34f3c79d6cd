#pragma once

#include <string_view>

#include "mm/core/program.hpp"

namespace mm {

/// Raised for text outside the block grammar. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses DSL text. Blocks are separated by newlines, `;` or whitespace.
/// Palette and block limits are not checked here (see validate_program).
Program parse_program(std::string_view text);

}  // namespace mm
