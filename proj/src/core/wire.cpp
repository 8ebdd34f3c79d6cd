#include "mm/core/wire.hpp"

namespace mm {

using nlohmann::json;

namespace {

json sequence_to_wire(const Sequence& seq) {
  json arr = json::array();
  for (const Block& b : seq) arr.push_back(to_wire(b));
  return arr;
}

Sequence sequence_from_wire(const json& j) {
  if (!j.is_array()) throw Error("wire AST: expected an array of blocks");
  Sequence seq;
  seq.reserve(j.size());
  for (const json& e : j) seq.push_back(block_from_wire(e));
  return seq;
}

}  // namespace

json to_wire(const Block& b) {
  json j = {{"kind", std::string(keyword(b.kind))}};
  if (b.kind == BlockKind::Repeat) j["count"] = b.count;
  if (is_conditional(b.kind)) j["cond"] = std::string(keyword(b.condition));
  if (b.has_body()) j["body"] = sequence_to_wire(b.body);
  if (b.kind == BlockKind::IfElse) j["else_body"] = sequence_to_wire(b.else_body);
  return j;
}

json to_wire(const Program& p) { return sequence_to_wire(p.blocks); }

Block block_from_wire(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error("wire AST: block record needs a string 'kind'");
  auto kind = block_kind_from_keyword(j["kind"].get<std::string>());
  if (!kind) throw Error("wire AST: unknown block kind '" + j["kind"].get<std::string>() + "'");
  Block b;
  b.kind = *kind;
  if (is_basic(*kind)) return b;
  if (*kind == BlockKind::Repeat) {
    if (!j.contains("count") || !j["count"].is_number_integer())
      throw Error("wire AST: repeat needs an integer 'count'");
    b.count = j["count"].get<int>();
  }
  if (is_conditional(*kind)) {
    auto c = j.contains("cond") && j["cond"].is_string()
                 ? condition_from_keyword(j["cond"].get<std::string>())
                 : std::nullopt;
    if (!c) throw Error("wire AST: conditional needs a valid 'cond'");
    b.condition = *c;
  }
  if (j.contains("body")) b.body = sequence_from_wire(j["body"]);
  if (*kind == BlockKind::IfElse && j.contains("else_body"))
    b.else_body = sequence_from_wire(j["else_body"]);
  return b;
}

Program program_from_wire(const json& j) { return Program(sequence_from_wire(j)); }

}  // namespace mm
