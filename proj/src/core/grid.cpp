#include "mm/core/grid.hpp"

namespace mm {

std::string_view keyword(Direction d) {
  switch (d) {
    case Direction::North: return "N";
    case Direction::East: return "E";
    case Direction::South: return "S";
    case Direction::West: return "W";
  }
  return "?";
}

std::optional<Direction> direction_from_keyword(std::string_view s) {
  for (Direction d : {Direction::North, Direction::East, Direction::South, Direction::West})
    if (keyword(d) == s) return d;
  return std::nullopt;
}

Direction turned_left(Direction d) { return static_cast<Direction>((static_cast<int>(d) + 3) % 4); }
Direction turned_right(Direction d) { return static_cast<Direction>((static_cast<int>(d) + 1) % 4); }

Cell step(Cell c, Direction d) {
  switch (d) {
    case Direction::North: return {c.row - 1, c.col};
    case Direction::East: return {c.row, c.col + 1};
    case Direction::South: return {c.row + 1, c.col};
    case Direction::West: return {c.row, c.col - 1};
  }
  return c;
}

TaskGrid::TaskGrid(int width, int height, std::vector<std::uint8_t> walls, Pose start, Cell goal)
    : width_(width), height_(height), walls_(std::move(walls)), start_(start), goal_(goal) {
  if (width < 1 || height < 1 || width > kMaxGridSide || height > kMaxGridSide)
    throw Error("grid dimensions must be between 1 and " + std::to_string(kMaxGridSide));
  if (walls_.size() != static_cast<std::size_t>(width * height))
    throw Error("grid cell count does not match its dimensions");
  if (!is_free(start_.cell)) throw Error("grid start must be a free cell inside the grid");
  if (!is_free(goal_)) throw Error("grid goal must be a free cell inside the grid");
  if (start_.cell == goal_) throw Error("grid start and goal must differ");
}

TaskGrid TaskGrid::from_rows(const std::vector<std::string>& rows, Direction start_dir) {
  if (rows.empty()) throw Error("grid has no rows");
  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows.front().size());
  std::vector<std::uint8_t> walls;
  walls.reserve(static_cast<std::size_t>(width * height));
  int starts = 0, goals = 0;
  Cell start, goal;
  for (int r = 0; r < height; ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != width)
      throw Error("grid rows must all have the same width");
    for (int c = 0; c < width; ++c) {
      switch (rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) {
        case '#': walls.push_back(1); break;
        case '.': walls.push_back(0); break;
        case 'S':
          walls.push_back(0);
          start = {r, c};
          ++starts;
          break;
        case 'G':
          walls.push_back(0);
          goal = {r, c};
          ++goals;
          break;
        default:
          throw Error("grid row " + std::to_string(r) + " has an invalid cell character");
      }
    }
  }
  if (starts != 1 || goals != 1) throw Error("grid needs exactly one 'S' and one 'G'");
  return TaskGrid(width, height, std::move(walls), Pose{start, start_dir}, goal);
}

int TaskGrid::free_cell_count() const {
  int n = 0;
  for (auto w : walls_) n += w == 0;
  return n;
}

std::vector<std::string> TaskGrid::to_rows() const {
  std::vector<std::string> rows(static_cast<std::size_t>(height_), std::string(static_cast<std::size_t>(width_), '.'));
  for (int r = 0; r < height_; ++r)
    for (int c = 0; c < width_; ++c)
      if (is_wall({r, c})) rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = '#';
  rows[static_cast<std::size_t>(start_.cell.row)][static_cast<std::size_t>(start_.cell.col)] = 'S';
  rows[static_cast<std::size_t>(goal_.row)][static_cast<std::size_t>(goal_.col)] = 'G';
  return rows;
}

std::string TaskGrid::canonical_text() const {
  std::string out;
  for (const auto& r : to_rows()) {
    out += r;
    out += '/';
  }
  out += keyword(start_.dir);
  return out;
}

}  // namespace mm
