#pragma once

#include <span>
#include <utility>
#include <vector>

#include "docstruct/model.hpp"

namespace docstruct {

// A reconstructed table: rows sorted top to bottom, columns left to right,
// and one cell per grid position (spanning cells cover several positions).
struct TableGrid {
  BBox tabular;
  std::vector<BBox> rows;
  std::vector<BBox> columns;
  std::vector<Entity> cells;  // each carries a cell_range
};

// Rows/columns recovered from cell boxes alone: cell centroids are grouped
// greedily along each axis (consecutive sorted coordinates closer than
// `gap`); each group of two or more yields the union box of its cells.
std::pair<std::vector<BBox>, std::vector<BBox>> rows_cols_from_cells(
    std::span<const BBox> cells, double gap = 5.0);

// Nested detections collapse: a box containing exactly one other loses the
// inner one, a box containing several loses itself; repeated to fixpoint.
// Exact duplicates are removed first.
std::vector<BBox> resolve_nested_boxes(std::vector<BBox> boxes);

// Rows stretch to the union's x-extent, columns to its y-extent. Returns
// the union box (the tabular region). Throws on no boxes at all.
BBox normalize_extents(std::vector<BBox>& rows, std::vector<BBox>& columns);

// Adjacent rows/columns meet at the midpoint between their facing edges,
// so interior boundaries partition the tabular exactly.
void center_boundaries(std::vector<BBox>& rows, std::vector<BBox>& columns);

// Cell ranges from grid overlap: a cell claims every row covering at least
// half that row's height (columns likewise). Cells matching no row or no
// column are dismissed; cells spanning several positions snap to the grid.
std::vector<Entity> assign_cell_ranges(std::span<const Entity> cells,
                                       std::span<const BBox> rows,
                                       std::span<const BBox> columns);

// Grid completion: every position not covered by a spanning cell gets a
// synthesized cell from the row/column intersection.
TableGrid fill_grid(std::vector<BBox> rows, std::vector<BBox> columns,
                    std::vector<Entity> spanning_cells);

// Full reconstruction from detected rows, columns and cells. Rows or
// columns missing entirely are synthesized from the cells; a table with
// neither detections nor enough cells throws ("degenerate table").
TableGrid parse_table(std::span<const Entity> detections, double centroid_gap = 5.0);

struct CellTextMatch {
  std::string cell_id;
  std::string text_id;
  double gamma = 0.0;  // fraction of the text box covered by the cell
};

// Text boxes land in the cell covering the largest fraction of them, if
// that fraction reaches min_coverage; ties go to the smaller (row, col).
std::vector<CellTextMatch> match_cells_to_text(const TableGrid& grid,
                                               std::span<const Entity> text_boxes,
                                               double min_coverage = 0.5);

}  // namespace docstruct
