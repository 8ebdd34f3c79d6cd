#include "mm/core/task.hpp"

#include "mm/core/parser.hpp"

namespace mm {

using nlohmann::json;

Palette Palette::all() {
  Palette p;
  for (BlockKind k : kAllKinds) p = p.with(k);
  return p;
}

std::vector<BlockKind> Palette::kinds() const {
  std::vector<BlockKind> out;
  for (BlockKind k : kAllKinds)
    if (allows(k)) out.push_back(k);
  return out;
}

std::string_view keyword(Phase p) { return p == Phase::Learning ? "learning" : "post_learning"; }

std::string_view keyword(Difficulty d) {
  switch (d) {
    case Difficulty::EasyL: return "easy_l";
    case Difficulty::HardL: return "hard_l";
    case Difficulty::EasyPL: return "easy_pl";
    case Difficulty::HardPL: return "hard_pl";
  }
  return "?";
}

std::string_view keyword(Novelty n) { return n == Novelty::CommonPL ? "common_pl" : "new_pl"; }

std::optional<Phase> phase_from_keyword(std::string_view s) {
  if (s == "learning") return Phase::Learning;
  if (s == "post_learning" || s == "postlearning" || s == "post-learning") return Phase::PostLearning;
  return std::nullopt;
}

std::optional<Difficulty> difficulty_from_keyword(std::string_view s) {
  for (Difficulty d : {Difficulty::EasyL, Difficulty::HardL, Difficulty::EasyPL, Difficulty::HardPL})
    if (keyword(d) == s) return d;
  return std::nullopt;
}

std::optional<Novelty> novelty_from_keyword(std::string_view s) {
  for (Novelty n : {Novelty::CommonPL, Novelty::NewPL})
    if (keyword(n) == s) return n;
  return std::nullopt;
}

namespace {

void check_sequence(const Sequence& seq, const TaskSpec& t, std::vector<Violation>& out) {
  for (const Block& b : seq) {
    if (!t.palette.allows(b.kind))
      out.push_back({Violation::Kind::Palette,
                     "block '" + std::string(keyword(b.kind)) + "' is not in the palette of " + t.id});
    if (b.kind == BlockKind::Repeat && (b.count < kMinRepeatCount || b.count > kMaxRepeatCount))
      out.push_back({Violation::Kind::RepeatCount,
                     "repeat count " + std::to_string(b.count) + " is outside " +
                         std::to_string(kMinRepeatCount) + ".." + std::to_string(kMaxRepeatCount)});
    check_sequence(b.body, t, out);
    check_sequence(b.else_body, t, out);
  }
}

}  // namespace

std::vector<Violation> validate_program(const Program& p, const TaskSpec& t) {
  std::vector<Violation> out;
  check_sequence(p.blocks, t, out);
  const std::size_t n = p.node_count();
  if (n > static_cast<std::size_t>(t.block_limit))
    out.push_back({Violation::Kind::BlockLimit, std::to_string(n) + " blocks exceed the limit of " +
                                                    std::to_string(t.block_limit)});
  return out;
}

bool is_solution(const Program& p, const TaskSpec& t) {
  return validate_program(p, t).empty() && execute(p, t.grid).success();
}

TaskSpec task_from_json(const json& j) {
  try {
    const std::string id = j.at("id").get<std::string>();
    const json& g = j.at("grid");
    auto dir = direction_from_keyword(g.at("start_dir").get<std::string>());
    if (!dir) throw Error("task " + id + ": invalid start_dir");
    TaskGrid grid = TaskGrid::from_rows(g.at("rows").get<std::vector<std::string>>(), *dir);
    Palette palette;
    for (const auto& k : j.at("palette")) {
      auto kind = block_kind_from_keyword(k.get<std::string>());
      if (!kind) throw Error("task " + id + ": unknown palette entry '" + k.get<std::string>() + "'");
      palette = palette.with(*kind);
    }
    auto difficulty = difficulty_from_keyword(j.at("difficulty").get<std::string>());
    if (!difficulty) throw Error("task " + id + ": invalid difficulty");
    std::optional<Novelty> novelty;
    if (j.contains("novelty") && !j["novelty"].is_null()) {
      novelty = novelty_from_keyword(j["novelty"].get<std::string>());
      if (!novelty) throw Error("task " + id + ": invalid novelty");
    }
    TaskSpec t{id,
               std::move(grid),
               palette,
               j.at("block_limit").get<int>(),
               parse_program(j.at("solution").get<std::string>()),
               j.at("concepts").get<std::vector<std::string>>(),
               *difficulty,
               novelty,
               j.value("layout_source", std::string("authored"))};
    if (t.block_limit < 1) throw Error("task " + id + ": block_limit must be positive");
    return t;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed task document: ") + e.what());
  }
}

json task_to_json(const TaskSpec& t) {
  json palette = json::array();
  for (BlockKind k : t.palette.kinds()) palette.push_back(std::string(keyword(k)));
  return {{"id", t.id},
          {"grid", {{"rows", t.grid.to_rows()}, {"start_dir", std::string(keyword(t.grid.start().dir))}}},
          {"palette", palette},
          {"block_limit", t.block_limit},
          {"solution", serialize_program(t.solution)},
          {"concepts", t.concepts},
          {"difficulty", std::string(keyword(t.difficulty))},
          {"novelty", t.novelty ? json(std::string(keyword(*t.novelty))) : json(nullptr)},
          {"layout_source", t.layout_source}};
}

}  // namespace mm
