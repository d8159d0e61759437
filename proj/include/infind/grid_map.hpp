#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace infind {

enum class CellKind { kFree, kWall, kLava, kGoal, kStart, kFlag };

enum class Direction { kUp = 0, kRight = 1, kDown = 2, kLeft = 3 };

/// Parse failure carrying the 1-based line and column of the offending input.
class MapParseError : public std::runtime_error {
 public:
  MapParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Grid layout with a slip model.
///
/// Text format: a header line `width height slip_intended slip_perp`, then
/// `height` lines of exactly `width` characters:
///   `#` wall, `.` free, `S` start, `G` goal, `L` lava, `F` flag.
/// Moves leaving the grid or entering a wall leave the agent in place.
class GridMap {
 public:
  GridMap(int width, int height, std::vector<CellKind> cells, double slip_intended, double slip_perp);

  int width() const { return width_; }
  int height() const { return height_; }
  double slip_intended() const { return slip_intended_; }
  double slip_perp() const { return slip_perp_; }

  CellKind at(Cell c) const { return cells_[static_cast<std::size_t>(c.row * width_ + c.col)]; }
  Cell start() const { return start_; }
  const std::vector<Cell>& goals() const { return goals_; }
  /// Flag cells in row-major order; a flag's bit index is its position here.
  const std::vector<Cell>& flags() const { return flags_; }

  /// Non-wall cells in row-major order.
  const std::vector<Cell>& locations() const { return locations_; }
  /// Index into locations(), or -1 for walls.
  int location_index(Cell c) const { return location_index_[static_cast<std::size_t>(c.row * width_ + c.col)]; }

  /// Deterministic result of moving one step in `dir`.
  Cell move(Cell from, Direction dir) const;

  /// (direction actually taken, probability) for an intended direction.
  std::vector<std::pair<Direction, double>> outcome_distribution(Direction intended) const;

  std::string to_text() const;

 private:
  int width_;
  int height_;
  std::vector<CellKind> cells_;
  double slip_intended_;
  double slip_perp_;
  Cell start_;
  std::vector<Cell> goals_;
  std::vector<Cell> flags_;
  std::vector<Cell> locations_;
  std::vector<int> location_index_;
};

GridMap parse_grid_map(std::string_view text);
GridMap load_grid_map(const std::string& path);

/// Built-in layouts, identical to the files under maps/.
std::string_view lavalake_5x7_text();
std::string_view lavalake_10x10_text();
std::string_view maze_text();

}  // namespace infind
