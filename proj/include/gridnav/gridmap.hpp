#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace gridnav {

enum class Cell : uint8_t { Free, Occupied, Unknown };

struct MapParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// map_server metadata. origin yaw is radians and only stored, never applied;
// rotated maps are rejected upstream by convention (yaw must be 0).
struct MapMetadata {
  std::string image;
  double resolution = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  double origin_yaw = 0.0;
  bool negate = false;
  double occupied_thresh = 0.65;
  double free_thresh = 0.196;
};

// Row-major grid with row 0 at the bottom (world y increases with row).
struct OccupancyGrid {
  int width = 0;
  int height = 0;
  double resolution = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<Cell> cells;

  bool in_bounds(int col, int row) const {
    return col >= 0 && col < width && row >= 0 && row < height;
  }
  Cell at(int col, int row) const { return cells[static_cast<size_t>(row) * width + col]; }
  Cell& at(int col, int row) { return cells[static_cast<size_t>(row) * width + col]; }

  double x_min() const { return origin_x; }
  double y_min() const { return origin_y; }
  double x_max() const { return origin_x + width * resolution; }
  double y_max() const { return origin_y + height * resolution; }
  Workspace extent() const { return {x_min(), y_min(), x_max(), y_max()}; }
};

struct CellIndex {
  int col = 0;
  int row = 0;
};

namespace detail {

inline std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) pos++;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw MapParseError(std::string("bad numeric value for ") + what + ": '" + s + "'");
  }
}

}  // namespace detail

// Parses the flat map_server YAML subset: image, resolution, origin (flow
// list of 3 numbers), negate, occupied_thresh, free_thresh. Unknown keys are
// ignored; missing required keys are errors.
inline MapMetadata parse_map_yaml(const std::string& text) {
  MapMetadata meta;
  bool have_image = false, have_res = false, have_origin = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::strip(line);
    if (line.empty()) continue;
    size_t colon = line.find(':');
    if (colon == std::string::npos) throw MapParseError("expected 'key: value' line: '" + line + "'");
    std::string key = detail::strip(line.substr(0, colon));
    std::string value = detail::strip(line.substr(colon + 1));
    if (key == "image") {
      if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
          value.back() == value.front())
        value = value.substr(1, value.size() - 2);
      if (value.empty()) throw MapParseError("empty image path");
      meta.image = value;
      have_image = true;
    } else if (key == "resolution") {
      meta.resolution = detail::parse_number(value, "resolution");
      have_res = true;
    } else if (key == "origin") {
      if (value.size() < 2 || value.front() != '[' || value.back() != ']')
        throw MapParseError("origin must be a flow list [x, y, yaw]");
      std::string body = value.substr(1, value.size() - 2);
      std::vector<double> nums;
      std::string item;
      std::istringstream items(body);
      while (std::getline(items, item, ',')) nums.push_back(detail::parse_number(detail::strip(item), "origin"));
      if (nums.size() != 3) throw MapParseError("origin must have 3 components");
      meta.origin_x = nums[0];
      meta.origin_y = nums[1];
      meta.origin_yaw = nums[2];
      have_origin = true;
    } else if (key == "negate") {
      meta.negate = detail::parse_number(value, "negate") != 0.0;
    } else if (key == "occupied_thresh") {
      meta.occupied_thresh = detail::parse_number(value, "occupied_thresh");
    } else if (key == "free_thresh") {
      meta.free_thresh = detail::parse_number(value, "free_thresh");
    }
    // other map_server keys (mode, ...) are irrelevant here
  }
  if (!have_image) throw MapParseError("missing key: image");
  if (!have_res) throw MapParseError("missing key: resolution");
  if (!have_origin) throw MapParseError("missing key: origin");
  if (meta.resolution <= 0.0) throw MapParseError("resolution must be positive");
  if (meta.origin_yaw != 0.0) throw MapParseError("rotated maps (origin yaw != 0) are unsupported");
  if (!(meta.free_thresh >= 0.0 && meta.free_thresh <= meta.occupied_thresh && meta.occupied_thresh <= 1.0))
    throw MapParseError("thresholds must satisfy 0 <= free_thresh <= occupied_thresh <= 1");
  return meta;
}

namespace detail {

struct PgmReader {
  const std::vector<uint8_t>& bytes;
  size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }
  uint8_t peek() const { return bytes[pos]; }

  void skip_ws_and_comments() {
    while (!eof()) {
      uint8_t c = bytes[pos];
      if (c == '#') {
        while (!eof() && bytes[pos] != '\n') pos++;
      } else if (std::isspace(c)) {
        pos++;
      } else {
        break;
      }
    }
  }

  std::string token() {
    skip_ws_and_comments();
    size_t start = pos;
    while (!eof() && !std::isspace(bytes[pos]) && bytes[pos] != '#') pos++;
    if (start == pos) throw MapParseError("truncated PGM header");
    return std::string(bytes.begin() + start, bytes.begin() + pos);
  }

  int header_int(const char* what) {
    std::string t = token();
    try {
      size_t p = 0;
      int v = std::stoi(t, &p);
      if (p != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw MapParseError(std::string("bad PGM ") + what + ": '" + t + "'");
    }
  }
};

}  // namespace detail

// Decodes P5 (binary) or P2 (ASCII) PGM, maxval 255, and classifies pixels by
// occupancy fraction f = (255 - p) / 255 (p / 255 when negate is set):
// Occupied when f >= occupied_thresh, Free when f <= free_thresh, else
// Unknown. PGM row 0 is the top of the image; grid row 0 is the bottom.
inline OccupancyGrid parse_pgm(const std::vector<uint8_t>& bytes, const MapMetadata& meta) {
  detail::PgmReader rd{bytes};
  std::string magic = rd.token();
  if (magic != "P5" && magic != "P2") throw MapParseError("unsupported PGM magic '" + magic + "'");
  int width = rd.header_int("width");
  int height = rd.header_int("height");
  int maxval = rd.header_int("maxval");
  if (width <= 0 || height <= 0) throw MapParseError("non-positive PGM dimensions");
  if (maxval != 255) throw MapParseError("PGM maxval must be 255");

  std::vector<uint8_t> pixels;
  pixels.reserve(static_cast<size_t>(width) * height);
  if (magic == "P5") {
    if (rd.eof() || !std::isspace(rd.peek())) throw MapParseError("missing raster separator");
    rd.pos++;
    size_t need = static_cast<size_t>(width) * height;
    if (bytes.size() - rd.pos < need) throw MapParseError("truncated PGM raster");
    pixels.assign(bytes.begin() + rd.pos, bytes.begin() + rd.pos + need);
  } else {
    for (long i = 0; i < static_cast<long>(width) * height; i++) {
      int v = rd.header_int("pixel");
      if (v < 0 || v > 255) throw MapParseError("PGM pixel out of range");
      pixels.push_back(static_cast<uint8_t>(v));
    }
  }

  OccupancyGrid grid;
  grid.width = width;
  grid.height = height;
  grid.resolution = meta.resolution;
  grid.origin_x = meta.origin_x;
  grid.origin_y = meta.origin_y;
  grid.cells.resize(static_cast<size_t>(width) * height);
  for (int img_row = 0; img_row < height; img_row++) {
    int grid_row = height - 1 - img_row;
    for (int col = 0; col < width; col++) {
      uint8_t p = pixels[static_cast<size_t>(img_row) * width + col];
      double f = meta.negate ? p / 255.0 : (255.0 - p) / 255.0;
      Cell c = f >= meta.occupied_thresh ? Cell::Occupied
               : f <= meta.free_thresh   ? Cell::Free
                                         : Cell::Unknown;
      grid.at(col, grid_row) = c;
    }
  }
  return grid;
}

inline OccupancyGrid parse_map(const std::string& yaml_text, const std::vector<uint8_t>& pgm_bytes) {
  return parse_pgm(pgm_bytes, parse_map_yaml(yaml_text));
}

// Loads YAML from disk and the PGM it names (relative paths resolve against
// the YAML's directory).
inline OccupancyGrid load_map(const std::string& yaml_path) {
  std::ifstream yf(yaml_path);
  if (!yf) throw MapParseError("cannot open map YAML: " + yaml_path);
  std::stringstream ybuf;
  ybuf << yf.rdbuf();
  MapMetadata meta = parse_map_yaml(ybuf.str());
  std::filesystem::path img(meta.image);
  if (img.is_relative()) img = std::filesystem::path(yaml_path).parent_path() / img;
  std::ifstream pf(img, std::ios::binary);
  if (!pf) throw MapParseError("cannot open map image: " + img.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(pf)), std::istreambuf_iterator<char>());
  return parse_pgm(bytes, meta);
}

inline CellIndex world_to_cell(const OccupancyGrid& grid, const Point& p) {
  double tc = (p.x - grid.origin_x) / grid.resolution;
  double tr = (p.y - grid.origin_y) / grid.resolution;
  int col = static_cast<int>(std::floor(tc));
  int row = static_cast<int>(std::floor(tr));
  // the max edge belongs to the last cell
  if (col == grid.width && tc - grid.width <= kEps) col--;
  if (row == grid.height && tr - grid.height <= kEps) row--;
  if (!grid.in_bounds(col, row)) throw std::out_of_range("point outside grid extent");
  return {col, row};
}

inline Point cell_to_world(const OccupancyGrid& grid, int col, int row) {
  if (!grid.in_bounds(col, row)) throw std::out_of_range("cell index outside grid");
  return {grid.origin_x + (col + 0.5) * grid.resolution,
          grid.origin_y + (row + 0.5) * grid.resolution};
}

struct ExtractOptions {
  // Recursively split sparse component boxes (fill < 0.5) along the longer
  // axis down to 2x2 cells. Off by default; bounding boxes are conservative.
  bool refine_split = false;
};

namespace detail {

struct Component {
  int min_col, min_row, max_col, max_row;
  std::vector<CellIndex> cells;
};

inline ObstacleRect box_to_world(const OccupancyGrid& g, int min_col, int min_row, int max_col,
                                 int max_row) {
  return {g.origin_x + min_col * g.resolution, g.origin_y + min_row * g.resolution,
          g.origin_x + (max_col + 1) * g.resolution, g.origin_y + (max_row + 1) * g.resolution};
}

inline void split_box(const OccupancyGrid& grid, const std::vector<CellIndex>& cells,
                      std::vector<ObstacleRect>& out) {
  int min_col = cells[0].col, max_col = cells[0].col;
  int min_row = cells[0].row, max_row = cells[0].row;
  for (const CellIndex& c : cells) {
    min_col = std::min(min_col, c.col);
    max_col = std::max(max_col, c.col);
    min_row = std::min(min_row, c.row);
    max_row = std::max(max_row, c.row);
  }
  int w = max_col - min_col + 1;
  int h = max_row - min_row + 1;
  double fill = static_cast<double>(cells.size()) / (static_cast<double>(w) * h);
  if (fill >= 0.5 || (w <= 2 && h <= 2)) {
    out.push_back(box_to_world(grid, min_col, min_row, max_col, max_row));
    return;
  }
  std::vector<CellIndex> lo, hi;
  if (w >= h) {
    int mid = min_col + w / 2;
    for (const CellIndex& c : cells) (c.col < mid ? lo : hi).push_back(c);
  } else {
    int mid = min_row + h / 2;
    for (const CellIndex& c : cells) (c.row < mid ? lo : hi).push_back(c);
  }
  if (!lo.empty()) split_box(grid, lo, out);
  if (!hi.empty()) split_box(grid, hi, out);
}

}  // namespace detail

// Groups non-Free cells (Unknown counts as occupied) into 8-connected
// components and returns one world-space bounding box per component, sorted
// by (x_bl, y_bl, x_tr, y_tr).
inline std::vector<ObstacleRect> extract_obstacles(const OccupancyGrid& grid,
                                                   const ExtractOptions& opts = {}) {
  std::vector<uint8_t> seen(grid.cells.size(), 0);
  std::vector<ObstacleRect> out;
  std::vector<CellIndex> stack;
  for (int row = 0; row < grid.height; row++) {
    for (int col = 0; col < grid.width; col++) {
      size_t idx = static_cast<size_t>(row) * grid.width + col;
      if (seen[idx] || grid.cells[idx] == Cell::Free) continue;
      std::vector<CellIndex> comp;
      stack.clear();
      stack.push_back({col, row});
      seen[idx] = 1;
      while (!stack.empty()) {
        CellIndex c = stack.back();
        stack.pop_back();
        comp.push_back(c);
        for (int dr = -1; dr <= 1; dr++) {
          for (int dc = -1; dc <= 1; dc++) {
            if (dr == 0 && dc == 0) continue;
            int nc = c.col + dc, nr = c.row + dr;
            if (!grid.in_bounds(nc, nr)) continue;
            size_t nidx = static_cast<size_t>(nr) * grid.width + nc;
            if (seen[nidx] || grid.cells[nidx] == Cell::Free) continue;
            seen[nidx] = 1;
            stack.push_back({nc, nr});
          }
        }
      }
      if (opts.refine_split) {
        detail::split_box(grid, comp, out);
      } else {
        int min_col = comp[0].col, max_col = comp[0].col;
        int min_row = comp[0].row, max_row = comp[0].row;
        for (const CellIndex& c : comp) {
          min_col = std::min(min_col, c.col);
          max_col = std::max(max_col, c.col);
          min_row = std::min(min_row, c.row);
          max_row = std::max(max_row, c.row);
        }
        out.push_back(detail::box_to_world(grid, min_col, min_row, max_col, max_row));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ObstacleRect& a, const ObstacleRect& b) {
    if (a.x_bl != b.x_bl) return a.x_bl < b.x_bl;
    if (a.y_bl != b.y_bl) return a.y_bl < b.y_bl;
    if (a.x_tr != b.x_tr) return a.x_tr < b.x_tr;
    return a.y_tr < b.y_tr;
  });
  return out;
}

// Grows each rectangle by r on all sides and clips to the workspace.
inline std::vector<ObstacleRect> inflate_obstacles(const std::vector<ObstacleRect>& rects,
                                                   double r, const Workspace& ws) {
  if (r < 0.0) throw std::invalid_argument("inflation radius must be non-negative");
  std::vector<ObstacleRect> out;
  out.reserve(rects.size());
  for (const ObstacleRect& rect : rects) {
    ObstacleRect g{std::max(rect.x_bl - r, ws.x_min), std::max(rect.y_bl - r, ws.y_min),
                   std::min(rect.x_tr + r, ws.x_max), std::min(rect.y_tr + r, ws.y_max)};
    if (g.x_bl <= g.x_tr && g.y_bl <= g.y_tr) out.push_back(g);
  }
  return out;
}

}  // namespace gridnav
