#pragma once

#include "json.hpp"

#include "mm/core/program.hpp"

namespace mm {

/// Wire AST: an array of records {kind, count?, cond?, body?, else_body?}.
nlohmann::json to_wire(const Program& p);
nlohmann::json to_wire(const Block& b);
Program program_from_wire(const nlohmann::json& j);
Block block_from_wire(const nlohmann::json& j);

}  // namespace mm
