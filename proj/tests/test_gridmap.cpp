#include <catch2/catch_amalgamated.hpp>

#include <gridnav/gridmap.hpp>

#include "helpers.hpp"

using namespace gridnav;

TEST_CASE("parse_map_yaml reads the map_server key set") {
  MapMetadata m = parse_map_yaml(
      "# a comment\n"
      "image: maps/floor.pgm\n"
      "resolution: 0.05\n"
      "origin: [-1.5, 2.0, 0.0]\n"
      "negate: 0\n"
      "occupied_thresh: 0.65\n"
      "free_thresh: 0.196\n"
      "mode: trinary\n");
  CHECK(m.image == "maps/floor.pgm");
  CHECK(m.resolution == 0.05);
  CHECK(m.origin_x == -1.5);
  CHECK(m.origin_y == 2.0);
  CHECK(m.negate == false);
  CHECK(m.occupied_thresh == 0.65);
  CHECK(m.free_thresh == 0.196);

  CHECK(parse_map_yaml("image: 'q.pgm'\nresolution: 1\norigin: [0,0,0]\n").image == "q.pgm");
  CHECK(parse_map_yaml("image: \"q.pgm\"  # trailing\nresolution: 1\norigin: [0,0,0]\n").negate ==
        false);

  CHECK_THROWS_AS(parse_map_yaml("resolution: 1\norigin: [0,0,0]\n"), MapParseError);
  CHECK_THROWS_AS(parse_map_yaml("image: a.pgm\norigin: [0,0,0]\n"), MapParseError);
  CHECK_THROWS_AS(parse_map_yaml("image: a.pgm\nresolution: 1\n"), MapParseError);
  CHECK_THROWS_AS(parse_map_yaml("image: a.pgm\nresolution: 1\norigin: [0,0]\n"), MapParseError);
  CHECK_THROWS_AS(parse_map_yaml("image: a.pgm\nresolution: 1\norigin: [0,0,0.3]\n"),
                  MapParseError);  // rotated maps unsupported
  CHECK_THROWS_AS(parse_map_yaml("image: a.pgm\nresolution: -2\norigin: [0,0,0]\n"),
                  MapParseError);
  CHECK_THROWS_AS(parse_map_yaml("image: a.pgm\nresolution: x\norigin: [0,0,0]\n"),
                  MapParseError);
  CHECK_THROWS_AS(
      parse_map_yaml("image: a.pgm\nresolution: 1\norigin: [0,0,0]\nfree_thresh: 0.9\n"),
      MapParseError);  // free_thresh above occupied_thresh
}

TEST_CASE("parse_pgm classifies occupancy fractions") {
  // image rows top-down; grid row 0 is the bottom row of the world
  std::vector<uint8_t> px = {0, 254, 205,    // top image row -> grid row 1
                             100, 0, 254};   // bottom image row -> grid row 0
  MapMetadata meta = parse_map_yaml(testutil::basic_yaml());
  OccupancyGrid g = parse_pgm(testutil::make_pgm_p5(3, 2, px), meta);
  REQUIRE(g.width == 3);
  REQUIRE(g.height == 2);

  CHECK(g.at(0, 0) == Cell::Unknown);   // 100: f = 155/255 = 0.608
  CHECK(g.at(1, 0) == Cell::Occupied);  // 0:   f = 1
  CHECK(g.at(2, 0) == Cell::Free);      // 254: f = 1/255
  CHECK(g.at(0, 1) == Cell::Occupied);
  CHECK(g.at(1, 1) == Cell::Free);
  // 205: f = 50/255 = 0.19608 sits strictly between the thresholds
  CHECK(g.at(2, 1) == Cell::Unknown);

  SECTION("negate flips the fraction") {
    MapMetadata neg = meta;
    neg.negate = true;
    OccupancyGrid gn = parse_pgm(testutil::make_pgm_p5(3, 2, px), neg);
    CHECK(gn.at(1, 0) == Cell::Free);      // 0 -> f = 0
    CHECK(gn.at(2, 0) == Cell::Occupied);  // 254 -> f = 0.996
    CHECK(gn.at(2, 1) == Cell::Occupied);  // 205 -> f = 0.804
    CHECK(gn.at(0, 0) == Cell::Unknown);   // 100 -> f = 0.392
  }

  SECTION("P2 ASCII raster gives the same grid") {
    std::string p2 = "P2\n# comment\n3 2\n255\n0 254 205\n100 0 254\n";
    OccupancyGrid g2 = parse_pgm(std::vector<uint8_t>(p2.begin(), p2.end()), meta);
    REQUIRE(g2.cells.size() == g.cells.size());
    for (size_t i = 0; i < g.cells.size(); i++) CHECK(g2.cells[i] == g.cells[i]);
  }

  SECTION("header comments and whitespace") {
    std::string hdr = "P5 # magic\n# size next\n 3\t2 # dims\n255\n";
    std::vector<uint8_t> bytes(hdr.begin(), hdr.end());
    bytes.insert(bytes.end(), px.begin(), px.end());
    OccupancyGrid g3 = parse_pgm(bytes, meta);
    CHECK(g3.at(1, 0) == Cell::Occupied);
  }

  SECTION("malformed inputs") {
    CHECK_THROWS_AS(parse_pgm(testutil::make_pgm_p5(3, 2, {0, 0, 0}), meta), MapParseError);
    std::string bad_magic = "P6\n3 2\n255\n";
    CHECK_THROWS_AS(parse_pgm(std::vector<uint8_t>(bad_magic.begin(), bad_magic.end()), meta),
                    MapParseError);
    std::string bad_maxval = "P2\n1 1\n65535\n12\n";
    CHECK_THROWS_AS(parse_pgm(std::vector<uint8_t>(bad_maxval.begin(), bad_maxval.end()), meta),
                    MapParseError);
    std::string bad_pixel = "P2\n1 1\n255\n300\n";
    CHECK_THROWS_AS(parse_pgm(std::vector<uint8_t>(bad_pixel.begin(), bad_pixel.end()), meta),
                    MapParseError);
    CHECK_THROWS_AS(parse_pgm({}, meta), MapParseError);
  }
}

TEST_CASE("world/cell transforms") {
  OccupancyGrid g = testutil::grid_from_rows({"....", "....", "...."}, 0.5, -1.0, 2.0);
  CHECK(g.x_min() == -1.0);
  CHECK(g.x_max() == 1.0);
  CHECK(g.y_min() == 2.0);
  CHECK(g.y_max() == 3.5);

  CellIndex c = world_to_cell(g, {-1.0, 2.0});
  CHECK(c.col == 0);
  CHECK(c.row == 0);
  c = world_to_cell(g, {-0.75, 2.25});
  CHECK(c.col == 0);
  CHECK(c.row == 0);
  c = world_to_cell(g, {0.99, 3.49});
  CHECK(c.col == 3);
  CHECK(c.row == 2);
  // the max edge belongs to the last cell
  c = world_to_cell(g, {1.0, 3.5});
  CHECK(c.col == 3);
  CHECK(c.row == 2);
  CHECK_THROWS_AS(world_to_cell(g, {1.01, 3.0}), std::out_of_range);
  CHECK_THROWS_AS(world_to_cell(g, {0.0, 1.99}), std::out_of_range);

  Point p = cell_to_world(g, 0, 0);
  CHECK(p.x == Catch::Approx(-0.75));
  CHECK(p.y == Catch::Approx(2.25));
  CHECK_THROWS_AS(cell_to_world(g, 4, 0), std::out_of_range);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; i++) {
    Point q{testutil::uniform(rng, -1.0, 1.0), testutil::uniform(rng, 2.0, 3.5)};
    CellIndex ci = world_to_cell(g, q);
    Point center = cell_to_world(g, ci.col, ci.row);
    CHECK(std::abs(center.x - q.x) <= 0.25 + 1e-12);
    CHECK(std::abs(center.y - q.y) <= 0.25 + 1e-12);
  }
}

TEST_CASE("extract_obstacles groups 8-connected components into boxes") {
  SECTION("two components, unknown merges with occupied") {
    OccupancyGrid g = testutil::grid_from_rows({"........",
                                                "...?#...",
                                                "....#...",
                                                "........",
                                                "##......",
                                                "#......."},
                                               0.5, 0.0, 0.0);
    auto obs = extract_obstacles(g);
    REQUIRE(obs.size() == 2);
    // left blob: cols 0-1, rows 0-1 (diagonal-adjacent cells join)
    CHECK(obs[0].x_bl == Catch::Approx(0.0));
    CHECK(obs[0].y_bl == Catch::Approx(0.0));
    CHECK(obs[0].x_tr == Catch::Approx(1.0));
    CHECK(obs[0].y_tr == Catch::Approx(1.0));
    // right blob: the '?' at (3, row4) joins the '#'s at col 4
    CHECK(obs[1].x_bl == Catch::Approx(1.5));
    CHECK(obs[1].y_bl == Catch::Approx(1.5));
    CHECK(obs[1].x_tr == Catch::Approx(2.5));
    CHECK(obs[1].y_tr == Catch::Approx(2.5));
  }

  SECTION("empty and full grids") {
    CHECK(extract_obstacles(testutil::grid_from_rows({"..", ".."})).empty());
    auto full = extract_obstacles(testutil::grid_from_rows({"##", "##"}, 0.5));
    REQUIRE(full.size() == 1);
    CHECK(full[0].x_bl == 0.0);
    CHECK(full[0].y_bl == 0.0);
    CHECK(full[0].x_tr == 1.0);
    CHECK(full[0].y_tr == 1.0);
  }

  SECTION("output sorted by (x_bl, y_bl)") {
    OccupancyGrid g = testutil::grid_from_rows({"#..#", "....", "#..#"}, 1.0);
    auto obs = extract_obstacles(g);
    REQUIRE(obs.size() == 4);
    for (size_t i = 1; i < obs.size(); i++) {
      CHECK((obs[i - 1].x_bl < obs[i].x_bl ||
             (obs[i - 1].x_bl == obs[i].x_bl && obs[i - 1].y_bl <= obs[i].y_bl)));
    }
  }

  SECTION("refine_split breaks sparse diagonals") {
    OccupancyGrid g = testutil::grid_from_rows({"...#",
                                                "..#.",
                                                ".#..",
                                                "#..."},
                                               1.0);
    auto whole = extract_obstacles(g);
    REQUIRE(whole.size() == 1);  // one 8-connected diagonal component
    CHECK(whole[0].x_tr - whole[0].x_bl == Catch::Approx(4.0));

    ExtractOptions opts;
    opts.refine_split = true;
    auto split = extract_obstacles(g, opts);
    CHECK(split.size() == 2);  // fill 4/16 < 0.5 splits once into 2x2 halves
    for (const ObstacleRect& r : split) {
      CHECK(r.width() <= 2.0 + 1e-12);
      CHECK(r.height() <= 2.0 + 1e-12);
    }
    // every occupied cell stays covered
    for (int row = 0; row < 4; row++)
      for (int col = 0; col < 4; col++) {
        if (g.at(col, row) == Cell::Free) continue;
        Point center = cell_to_world(g, col, row);
        bool covered = false;
        for (const ObstacleRect& r : split) covered |= point_in_rect(center, r);
        CHECK(covered);
      }
  }
}

TEST_CASE("inflate_obstacles grows and clips") {
  Workspace ws{0, 0, 10, 10};
  std::vector<ObstacleRect> rects = {{2, 2, 4, 3}, {9.5, 9.5, 10, 10}};
  auto grown = inflate_obstacles(rects, 0.5, ws);
  REQUIRE(grown.size() == 2);
  CHECK(grown[0].x_bl == 1.5);
  CHECK(grown[0].y_bl == 1.5);
  CHECK(grown[0].x_tr == 4.5);
  CHECK(grown[0].y_tr == 3.5);
  CHECK(grown[1].x_bl == 9.0);
  CHECK(grown[1].x_tr == 10.0);  // clipped at the workspace edge

  auto same = inflate_obstacles(rects, 0.0, ws);
  CHECK(same[0].x_bl == 2.0);
  CHECK_THROWS_AS(inflate_obstacles(rects, -0.1, ws), std::invalid_argument);

  // a rect near the corner keeps a valid box after clipping
  auto corner = inflate_obstacles({{0, 0, 0.2, 0.2}}, 1.0, ws);
  REQUIRE(corner.size() == 1);
  CHECK(corner[0].x_bl == 0.0);
  CHECK(corner[0].y_bl == 0.0);
}

TEST_CASE("load_map reads the bundled environment") {
  OccupancyGrid g = load_map(testutil::source_dir() + "/scenarios/maps/env1.yaml");
  CHECK(g.width == 200);
  CHECK(g.height == 200);
  CHECK(g.resolution == 0.05);

  auto obs = extract_obstacles(g);
  REQUIRE(obs.size() == 4);
  // ground truth from the generator, sorted by x_bl
  CHECK(obs[0].x_bl == Catch::Approx(1.5));
  CHECK(obs[0].y_bl == Catch::Approx(6.0));
  CHECK(obs[0].x_tr == Catch::Approx(3.0));
  CHECK(obs[0].y_tr == Catch::Approx(7.0));
  CHECK(obs[1].x_bl == Catch::Approx(2.0));
  CHECK(obs[1].y_tr == Catch::Approx(3.5));
  CHECK(obs[2].x_bl == Catch::Approx(5.5));
  CHECK(obs[2].y_bl == Catch::Approx(5.0));
  CHECK(obs[3].x_bl == Catch::Approx(8.0));  // the unknown patch counts as an obstacle
  CHECK(obs[3].y_bl == Catch::Approx(1.0));
}
