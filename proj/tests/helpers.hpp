#pragma once

#include <random>
#include <string>
#include <vector>

#include <gridnav/gridmap.hpp>

namespace testutil {

inline std::string source_dir() { return GRIDNAV_SOURCE_DIR; }

// P5 raster from pixel rows given top-down, as in the file format.
inline std::vector<uint8_t> make_pgm_p5(int width, int height,
                                        const std::vector<uint8_t>& pixels_top_down) {
  std::string header = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), pixels_top_down.begin(), pixels_top_down.end());
  return bytes;
}

inline std::string basic_yaml(const std::string& image = "map.pgm", double resolution = 0.5,
                              double ox = 0.0, double oy = 0.0) {
  return "image: " + image + "\nresolution: " + std::to_string(resolution) + "\norigin: [" +
         std::to_string(ox) + ", " + std::to_string(oy) +
         ", 0.0]\nnegate: 0\noccupied_thresh: 0.65\nfree_thresh: 0.196\n";
}

inline gridnav::OccupancyGrid grid_from_rows(const std::vector<std::string>& rows_top_down,
                                             double resolution = 0.5, double ox = 0.0,
                                             double oy = 0.0) {
  // '#' occupied, '?' unknown, '.' free
  gridnav::OccupancyGrid g;
  g.height = static_cast<int>(rows_top_down.size());
  g.width = static_cast<int>(rows_top_down.front().size());
  g.resolution = resolution;
  g.origin_x = ox;
  g.origin_y = oy;
  g.cells.resize(static_cast<size_t>(g.width) * g.height);
  for (int r = 0; r < g.height; r++) {
    const std::string& row = rows_top_down[r];
    for (int c = 0; c < g.width; c++) {
      gridnav::Cell cell = row[c] == '#'   ? gridnav::Cell::Occupied
                           : row[c] == '?' ? gridnav::Cell::Unknown
                                           : gridnav::Cell::Free;
      g.at(c, g.height - 1 - r) = cell;
    }
  }
  return g;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testutil
