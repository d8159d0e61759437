#include "infind/grid_map.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace infind {

namespace {

// Keep in sync with maps/*.txt (checked by the environment tests).
constexpr std::string_view kLavaLake5x7 = R"MAP(7 5 0.8 0.1
S.LLL.G
.......
.......
.......
..LLL..
)MAP";
constexpr std::string_view kLavaLake10x10 = R"MAP(10 10 0.8 0.1
S.........
..........
..LLLLLL..
..LLLLLL..
..........
..........
...LLLL...
...LLLL..G
..........
..........
)MAP";
constexpr std::string_view kMaze = R"MAP(7 6 0.9 0.05
S.F#..G
.#.#...
.#...#.
...#F..
#.#.#..
F......
)MAP";

CellKind kind_from_char(char ch, int line, int column) {
  switch (ch) {
    case '#': return CellKind::kWall;
    case '.': return CellKind::kFree;
    case 'S': return CellKind::kStart;
    case 'G': return CellKind::kGoal;
    case 'L': return CellKind::kLava;
    case 'F': return CellKind::kFlag;
    default: throw MapParseError(line, column, std::string("unknown cell character '") + ch + "'");
  }
}

char char_from_kind(CellKind kind) {
  switch (kind) {
    case CellKind::kWall: return '#';
    case CellKind::kFree: return '.';
    case CellKind::kStart: return 'S';
    case CellKind::kGoal: return 'G';
    case CellKind::kLava: return 'L';
    case CellKind::kFlag: return 'F';
  }
  return '?';
}

bool passable_terminal(CellKind kind) { return kind == CellKind::kGoal || kind == CellKind::kLava; }

}  // namespace

MapParseError::MapParseError(int line, int column, const std::string& what)
    : std::runtime_error("map parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

GridMap::GridMap(int width, int height, std::vector<CellKind> cells, double slip_intended, double slip_perp)
    : width_(width), height_(height), cells_(std::move(cells)), slip_intended_(slip_intended), slip_perp_(slip_perp) {
  if (width_ < 1 || height_ < 1) throw std::invalid_argument("grid must be at least 1x1");
  if (cells_.size() != static_cast<std::size_t>(width_ * height_)) {
    throw std::invalid_argument("cell count does not match grid size");
  }
  if (slip_intended_ < 0.0 || slip_perp_ < 0.0 || std::abs(slip_intended_ + 2.0 * slip_perp_ - 1.0) > 1e-9) {
    throw std::invalid_argument("slip probabilities must satisfy intended + 2*perpendicular = 1");
  }
  int starts = 0;
  location_index_.assign(cells_.size(), -1);
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      const Cell cell{r, c};
      const CellKind kind = at(cell);
      if (kind == CellKind::kWall) continue;
      location_index_[static_cast<std::size_t>(r * width_ + c)] = static_cast<int>(locations_.size());
      locations_.push_back(cell);
      if (kind == CellKind::kStart) {
        start_ = cell;
        ++starts;
      } else if (kind == CellKind::kGoal) {
        goals_.push_back(cell);
      } else if (kind == CellKind::kFlag) {
        flags_.push_back(cell);
      }
    }
  }
  if (starts != 1) throw std::invalid_argument("grid must contain exactly one start cell");
  if (goals_.empty()) throw std::invalid_argument("grid must contain at least one goal cell");

  // Every non-wall cell must be reachable; episodes end on goal and lava, so
  // the search does not continue through them.
  std::vector<char> seen(cells_.size(), 0);
  std::vector<Cell> stack{start_};
  seen[static_cast<std::size_t>(start_.row * width_ + start_.col)] = 1;
  while (!stack.empty()) {
    Cell cur = stack.back();
    stack.pop_back();
    if (passable_terminal(at(cur))) continue;
    for (int d = 0; d < 4; ++d) {
      Cell next = move(cur, static_cast<Direction>(d));
      auto idx = static_cast<std::size_t>(next.row * width_ + next.col);
      if (!seen[idx]) {
        seen[idx] = 1;
        stack.push_back(next);
      }
    }
  }
  for (const Cell& cell : locations_) {
    if (!seen[static_cast<std::size_t>(cell.row * width_ + cell.col)]) {
      throw std::invalid_argument("cell (" + std::to_string(cell.row) + "," + std::to_string(cell.col) +
                                  ") is not reachable from the start");
    }
  }
}

Cell GridMap::move(Cell from, Direction dir) const {
  Cell to = from;
  switch (dir) {
    case Direction::kUp: --to.row; break;
    case Direction::kRight: ++to.col; break;
    case Direction::kDown: ++to.row; break;
    case Direction::kLeft: --to.col; break;
  }
  if (to.row < 0 || to.row >= height_ || to.col < 0 || to.col >= width_) return from;
  if (at(to) == CellKind::kWall) return from;
  return to;
}

std::vector<std::pair<Direction, double>> GridMap::outcome_distribution(Direction intended) const {
  const int d = static_cast<int>(intended);
  return {{intended, slip_intended_},
          {static_cast<Direction>((d + 1) % 4), slip_perp_},
          {static_cast<Direction>((d + 3) % 4), slip_perp_}};
}

std::string GridMap::to_text() const {
  std::ostringstream out;
  out << width_ << ' ' << height_ << ' ' << slip_intended_ << ' ' << slip_perp_ << '\n';
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) out << char_from_kind(at({r, c}));
    out << '\n';
  }
  return out.str();
}

GridMap parse_grid_map(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::string current;
    for (char ch : text) {
      if (ch == '\n') {
        if (!current.empty() && current.back() == '\r') current.pop_back();
        lines.push_back(current);
        current.clear();
      } else {
        current.push_back(ch);
      }
    }
    if (!current.empty()) lines.push_back(current);
  }
  if (lines.empty()) throw MapParseError(1, 1, "missing header line");

  std::istringstream header(lines[0]);
  int width = 0;
  int height = 0;
  double slip_intended = 0.0;
  double slip_perp = 0.0;
  if (!(header >> width >> height >> slip_intended >> slip_perp)) {
    throw MapParseError(1, 1, "header must be 'width height slip_intended slip_perp'");
  }
  std::string rest;
  if (header >> rest) throw MapParseError(1, static_cast<int>(lines[0].find(rest)) + 1, "trailing header tokens");
  if (width < 1 || height < 1) throw MapParseError(1, 1, "width and height must be positive");

  std::vector<CellKind> cells;
  cells.reserve(static_cast<std::size_t>(width * height));
  for (int r = 0; r < height; ++r) {
    const int line_no = r + 2;
    if (static_cast<std::size_t>(r + 1) >= lines.size()) throw MapParseError(line_no, 1, "missing grid row");
    const std::string& row = lines[static_cast<std::size_t>(r + 1)];
    for (int c = 0; c < width; ++c) {
      if (static_cast<std::size_t>(c) >= row.size()) throw MapParseError(line_no, c + 1, "grid row too short");
      cells.push_back(kind_from_char(row[static_cast<std::size_t>(c)], line_no, c + 1));
    }
    if (row.size() > static_cast<std::size_t>(width)) throw MapParseError(line_no, width + 1, "grid row too long");
  }
  for (std::size_t extra = static_cast<std::size_t>(height) + 1; extra < lines.size(); ++extra) {
    if (!lines[extra].empty()) throw MapParseError(static_cast<int>(extra) + 1, 1, "unexpected content after grid");
  }
  try {
    return GridMap(width, height, std::move(cells), slip_intended, slip_perp);
  } catch (const std::invalid_argument& e) {
    throw MapParseError(1, 1, e.what());
  }
}

GridMap load_grid_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid_map(buf.str());
}

std::string_view lavalake_5x7_text() { return kLavaLake5x7; }
std::string_view lavalake_10x10_text() { return kLavaLake10x10; }
std::string_view maze_text() { return kMaze; }

}  // namespace infind
