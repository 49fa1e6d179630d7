#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "docstruct/table_grid.hpp"

using namespace docstruct;

namespace {

Entity cell_ent(std::string id, BBox b) {
  Entity e;
  e.id = std::move(id);
  e.category = Category::table_cell;
  e.bbox = b;
  return e;
}

Entity grid_part(std::string id, Category c, BBox b) {
  Entity e;
  e.id = std::move(id);
  e.category = c;
  e.bbox = b;
  return e;
}

// cell (r, c) on a 30/40 pitch with 20x30 boxes
BBox pitched_cell(int r, int c) {
  return {c * 40.0, r * 30.0, c * 40.0 + 30.0, r * 30.0 + 20.0};
}

}  // namespace

TEST_CASE("rows and columns recovered from cell boxes") {
  std::vector<BBox> cells;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c)
      cells.push_back({c * 40.0, r * 30.0, c * 40.0 + 30.0, r * 30.0 + 20.0});
  const auto [rows, cols] = rows_cols_from_cells(cells);
  REQUIRE(rows.size() == 2);
  REQUIRE(cols.size() == 3);
  CHECK(rows[0] == BBox{0, 0, 110, 20});
  CHECK(rows[1] == BBox{0, 30, 110, 50});
  CHECK(cols[0] == BBox{0, 0, 30, 50});
  CHECK(cols[1] == BBox{40, 0, 70, 50});
  CHECK(cols[2] == BBox{80, 0, 110, 50});
}

TEST_CASE("centroid groups need at least two members") {
  const std::vector<BBox> cells = {
      {0, 0, 10, 20}, {0, 4, 10, 20}, {0, 30, 10, 50}};
  const auto [rows, cols] = rows_cols_from_cells(cells);
  // y-centroids 10 and 12 group; the lone 40 does not make a row.
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == BBox{0, 0, 10, 20});
  // all three share one x-centroid
  REQUIRE(cols.size() == 1);
  CHECK(cols[0] == BBox{0, 0, 10, 50});
}

TEST_CASE("nested box resolution") {
  SUBCASE("exact duplicates collapse") {
    const auto out = resolve_nested_boxes({{0, 0, 10, 10}, {0, 0, 10, 10}});
    CHECK(out.size() == 1);
  }
  SUBCASE("a box around exactly one other wins") {
    const auto out = resolve_nested_boxes({{0, 0, 20, 20}, {5, 5, 15, 15}});
    REQUIRE(out.size() == 1);
    CHECK(out[0] == BBox{0, 0, 20, 20});
  }
  SUBCASE("a box blanketing several loses") {
    const auto out =
        resolve_nested_boxes({{0, 0, 40, 20}, {2, 2, 18, 18}, {22, 2, 38, 18}});
    REQUIRE(out.size() == 2);
    CHECK(out[0] == BBox{2, 2, 18, 18});
    CHECK(out[1] == BBox{22, 2, 38, 18});
  }
  SUBCASE("three-deep nest settles in one surviving box") {
    const auto out = resolve_nested_boxes(
        {{0, 0, 30, 30}, {5, 5, 25, 25}, {10, 10, 20, 20}});
    REQUIRE(out.size() == 1);
    CHECK(out[0] == BBox{5, 5, 25, 25});
  }
}

TEST_CASE("extent normalization stretches to the union box") {
  std::vector<BBox> rows = {{0, 0, 100, 10}, {0, 12, 100, 22}};
  std::vector<BBox> cols = {{0, 0, 30, 22}, {40, 0, 98, 22}};
  const BBox tabular = normalize_extents(rows, cols);
  CHECK(tabular == BBox{0, 0, 100, 22});
  CHECK(rows[0].x1 == 100);
  CHECK(cols[1].x1 == 98);
  CHECK(cols[0].y1 == 22);

  std::vector<BBox> none;
  CHECK_THROWS_AS(normalize_extents(none, none), std::invalid_argument);
}

TEST_CASE("boundary centering meets at facing-edge midpoints") {
  std::vector<BBox> rows = {{0, 0, 100, 10}, {0, 12, 100, 20}};
  std::vector<BBox> cols;
  center_boundaries(rows, cols);
  CHECK(rows[0].y1 == 11);
  CHECK(rows[1].y0 == 11);
}

TEST_CASE("cell range assignment") {
  const std::vector<BBox> rows = {{0, 0, 100, 15}, {0, 15, 100, 30}};
  const std::vector<BBox> cols = {{0, 0, 50, 30}, {50, 0, 100, 30}};

  SUBCASE("single position keeps its own box") {
    const auto out =
        assign_cell_ranges(std::vector<Entity>{cell_ent("a", {2, 2, 48, 13})},
                           rows, cols);
    REQUIRE(out.size() == 1);
    CHECK(out[0].cell_range == CellRange{0, 0, 0, 0});
    CHECK(out[0].bbox == BBox{2, 2, 48, 13});
  }
  SUBCASE("spanning cells snap to the grid") {
    const auto out =
        assign_cell_ranges(std::vector<Entity>{cell_ent("w", {2, 2, 98, 13})},
                           rows, cols);
    REQUIRE(out.size() == 1);
    CHECK(out[0].cell_range == CellRange{0, 0, 0, 1});
    CHECK(out[0].bbox == BBox{0, 0, 100, 15});
  }
  SUBCASE("half coverage is inclusive") {
    const auto out = assign_cell_ranges(
        std::vector<Entity>{cell_ent("h", {2, 7.5, 48, 22.5})}, rows, cols);
    REQUIRE(out.size() == 1);
    CHECK(out[0].cell_range == CellRange{0, 1, 0, 0});
  }
  SUBCASE("cells matching no row are dismissed") {
    const auto out = assign_cell_ranges(
        std::vector<Entity>{cell_ent("thin", {0, 0, 100, 3})}, rows, cols);
    CHECK(out.empty());
  }
}

TEST_CASE("grid fill synthesizes uncovered positions") {
  std::vector<BBox> rows = {{0, 0, 100, 15}, {0, 15, 100, 30}};
  std::vector<BBox> cols = {{0, 0, 50, 30}, {50, 0, 100, 30}};
  Entity wide = cell_ent("wide", {0, 0, 100, 15});
  wide.cell_range = CellRange{0, 0, 0, 1};
  const TableGrid grid = fill_grid(rows, cols, {wide});

  CHECK(grid.tabular == BBox{0, 0, 100, 30});
  REQUIRE(grid.cells.size() == 3);
  CHECK(grid.cells[0].id == "wide");
  CHECK(grid.cells[1].id == "grid_r1c0");
  CHECK(grid.cells[1].bbox == BBox{0, 15, 50, 30});
  CHECK(grid.cells[2].id == "grid_r1c1");
  CHECK(grid.cells[2].bbox == BBox{50, 15, 100, 30});
}

TEST_CASE("full parse from cells alone") {
  std::vector<Entity> detections;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      detections.push_back(cell_ent("c" + std::to_string(r * 3 + c),
                                    pitched_cell(r, c)));
  const TableGrid grid = parse_table(detections);
  CHECK(grid.rows.size() == 3);
  CHECK(grid.columns.size() == 3);
  REQUIRE(grid.cells.size() == 9);
  std::set<std::pair<int, int>> positions;
  for (const Entity& cell : grid.cells) {
    REQUIRE(cell.cell_range.has_value());
    CHECK(cell.cell_range->row_start == cell.cell_range->row_end);
    CHECK(cell.cell_range->col_start == cell.cell_range->col_end);
    positions.insert({cell.cell_range->row_start, cell.cell_range->col_start});
  }
  CHECK(positions.size() == 9);
}

TEST_CASE("parse is invariant to detection order") {
  std::vector<Entity> detections;
  detections.push_back(grid_part("r0", Category::table_row, {0, 0, 100, 20}));
  detections.push_back(grid_part("r1", Category::table_row, {0, 30, 100, 50}));
  detections.push_back(grid_part("c0", Category::table_column, {0, 0, 30, 50}));
  detections.push_back(grid_part("c1", Category::table_column, {40, 0, 70, 50}));
  detections.push_back(cell_ent("wide", {0, 0, 68, 18}));

  const TableGrid a = parse_table(detections);
  std::reverse(detections.begin(), detections.end());
  const TableGrid b = parse_table(detections);

  CHECK(a.tabular == b.tabular);
  CHECK(a.rows == b.rows);
  CHECK(a.columns == b.columns);
  REQUIRE(a.cells.size() == b.cells.size());
  for (size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i] == b.cells[i]);

  // The detected spanning cell survives, snapped to the grid. Outer grid
  // edges keep their detected extent (col c1 ends at x=70), so the snap
  // covers the columns' span, not the full tabular width.
  CHECK(a.tabular == BBox{0, 0, 100, 50});
  REQUIRE(a.cells.size() == 3);
  CHECK(a.cells[0].id == "wide");
  CHECK(a.cells[0].cell_range == CellRange{0, 0, 0, 1});
  CHECK(a.cells[0].bbox == BBox{0, 0, 70, 25});
}

TEST_CASE("grid shape survives small jitter") {
  const double offsets[5] = {-2, -1, 0, 1, 2};
  int tick = 0;
  auto wobble = [&] { return offsets[tick++ % 5]; };
  std::vector<Entity> detections;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      BBox b = pitched_cell(r, c);
      b = {b.x0 + wobble(), b.y0 + wobble(), b.x1 + wobble(), b.y1 + wobble()};
      detections.push_back(cell_ent("c" + std::to_string(r * 4 + c), b));
    }
  }
  const TableGrid grid = parse_table(detections);
  CHECK(grid.rows.size() == 3);
  CHECK(grid.columns.size() == 4);
  REQUIRE(grid.cells.size() == 12);
  std::set<std::pair<int, int>> positions;
  for (const Entity& cell : grid.cells) {
    CHECK(cell.cell_range->row_start == cell.cell_range->row_end);
    CHECK(cell.cell_range->col_start == cell.cell_range->col_end);
    positions.insert({cell.cell_range->row_start, cell.cell_range->col_start});
  }
  CHECK(positions.size() == 12);
}

TEST_CASE("degenerate tables are rejected") {
  CHECK_THROWS_WITH_AS(parse_table(std::vector<Entity>{}),
                       doctest::Contains("degenerate table"),
                       std::invalid_argument);
  // one lone cell cannot seed a centroid group
  CHECK_THROWS_AS(parse_table(std::vector<Entity>{cell_ent("c", {0, 0, 30, 20})}),
                  std::invalid_argument);
}

TEST_CASE("text boxes land in the best covering cell") {
  std::vector<BBox> rows = {{0, 0, 100, 15}, {0, 15, 100, 30}};
  std::vector<BBox> cols = {{0, 0, 50, 30}, {50, 0, 100, 30}};
  const TableGrid grid = fill_grid(rows, cols, {});

  std::vector<Entity> text = {
      cell_ent("t1", {25, 2, 75, 13}),    // split evenly across c0/c1
      cell_ent("t2", {30, 16, 80, 29}),   // 40% in r1c0, 60% in r1c1
      cell_ent("t3", {200, 200, 300, 210}),  // outside the table
      cell_ent("t4", {0, 0, 100, 30}),    // spread too thin over all four
  };
  const auto matches = match_cells_to_text(grid, text);
  REQUIRE(matches.size() == 2);
  // exact halves tie; the earlier grid position wins
  CHECK(matches[0].text_id == "t1");
  CHECK(matches[0].cell_id == "grid_r0c0");
  CHECK(matches[0].gamma == doctest::Approx(0.5));
  CHECK(matches[1].text_id == "t2");
  CHECK(matches[1].cell_id == "grid_r1c1");
  CHECK(matches[1].gamma == doctest::Approx(0.6));
}
