#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mm/core/program.hpp"

namespace mm {

enum class Direction : std::uint8_t { North, East, South, West };

std::string_view keyword(Direction d);
std::optional<Direction> direction_from_keyword(std::string_view s);  // "N", "E", "S", "W"
Direction turned_left(Direction d);
Direction turned_right(Direction d);

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

Cell step(Cell c, Direction d);

struct Pose {
  Cell cell;
  Direction dir = Direction::East;
  friend bool operator==(const Pose&, const Pose&) = default;
};

inline constexpr int kMaxGridSide = 12;

/// A rectangular maze of free and wall cells with a start pose and a goal.
/// Construction validates bounds and that start and goal are distinct free cells.
class TaskGrid {
 public:
  TaskGrid(int width, int height, std::vector<std::uint8_t> walls, Pose start, Cell goal);

  /// Rows use '#' for walls, '.' for free cells, 'S' for the start and 'G' for the goal.
  static TaskGrid from_rows(const std::vector<std::string>& rows, Direction start_dir);

  int width() const { return width_; }
  int height() const { return height_; }
  const Pose& start() const { return start_; }
  const Cell& goal() const { return goal_; }

  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.col >= 0 && c.row < height_ && c.col < width_;
  }
  bool is_wall(Cell c) const { return walls_[index(c)] != 0; }
  /// In bounds and not a wall.
  bool is_free(Cell c) const { return in_bounds(c) && !is_wall(c); }
  int free_cell_count() const;

  std::vector<std::string> to_rows() const;
  /// Rows joined with '/', followed by the start direction; used for ordering and hashing.
  std::string canonical_text() const;

  friend bool operator==(const TaskGrid&, const TaskGrid&) = default;

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row * width_ + c.col); }

  int width_;
  int height_;
  std::vector<std::uint8_t> walls_;
  Pose start_;
  Cell goal_;
};

}  // namespace mm
