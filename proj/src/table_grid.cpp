#include "docstruct/table_grid.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace docstruct {

namespace {

double centroid_x(const BBox& b) { return (b.x0 + b.x1) / 2.0; }
double centroid_y(const BBox& b) { return (b.y0 + b.y1) / 2.0; }

double overlap_1d(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

std::vector<BBox> groups_along_axis(std::span<const BBox> cells, double gap,
                                    bool vertical) {
  std::vector<std::pair<double, const BBox*>> coords;
  coords.reserve(cells.size());
  for (const BBox& c : cells)
    coords.push_back({vertical ? centroid_y(c) : centroid_x(c), &c});
  std::sort(coords.begin(), coords.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<BBox> out;
  size_t start = 0;
  for (size_t i = 1; i <= coords.size(); ++i) {
    if (i < coords.size() && coords[i].first - coords[i - 1].first <= gap) continue;
    if (i - start >= 2) {
      BBox u = *coords[start].second;
      for (size_t k = start + 1; k < i; ++k) u = union_of(u, *coords[k].second);
      out.push_back(u);
    }
    start = i;
  }
  return out;
}

bool strictly_inside(const BBox& outer, const BBox& inner) {
  return contains(outer, inner) && !(outer == inner);
}

}  // namespace

std::pair<std::vector<BBox>, std::vector<BBox>> rows_cols_from_cells(
    std::span<const BBox> cells, double gap) {
  auto rows = groups_along_axis(cells, gap, /*vertical=*/true);
  auto cols = groups_along_axis(cells, gap, /*vertical=*/false);
  std::sort(rows.begin(), rows.end(),
            [](const BBox& a, const BBox& b) { return centroid_y(a) < centroid_y(b); });
  std::sort(cols.begin(), cols.end(),
            [](const BBox& a, const BBox& b) { return centroid_x(a) < centroid_x(b); });
  return {std::move(rows), std::move(cols)};
}

std::vector<BBox> resolve_nested_boxes(std::vector<BBox> boxes) {
  // Exact duplicates first, keeping the earliest.
  {
    std::vector<BBox> unique;
    for (const BBox& b : boxes)
      if (std::find(unique.begin(), unique.end(), b) == unique.end())
        unique.push_back(b);
    boxes = std::move(unique);
  }

  while (true) {
    const size_t n = boxes.size();
    std::vector<char> drop(n, 0);
    for (size_t i = 0; i < n; ++i) {
      std::vector<size_t> inside;
      for (size_t j = 0; j < n; ++j)
        if (j != i && strictly_inside(boxes[i], boxes[j])) inside.push_back(j);
      if (inside.size() == 1)
        drop[inside.front()] = 1;  // lone inner box is redundant
      else if (inside.size() > 1)
        drop[i] = 1;  // box blankets several others
    }
    if (std::none_of(drop.begin(), drop.end(), [](char d) { return d != 0; })) break;
    std::vector<BBox> kept;
    for (size_t i = 0; i < n; ++i)
      if (!drop[i]) kept.push_back(boxes[i]);
    boxes = std::move(kept);
  }
  return boxes;
}

BBox normalize_extents(std::vector<BBox>& rows, std::vector<BBox>& columns) {
  std::vector<BBox> all(rows.begin(), rows.end());
  all.insert(all.end(), columns.begin(), columns.end());
  if (all.empty())
    throw std::invalid_argument("normalize_extents: no rows or columns");
  const BBox tabular = union_bbox(all);
  for (BBox& r : rows) {
    r.x0 = tabular.x0;
    r.x1 = tabular.x1;
  }
  for (BBox& c : columns) {
    c.y0 = tabular.y0;
    c.y1 = tabular.y1;
  }
  return tabular;
}

void center_boundaries(std::vector<BBox>& rows, std::vector<BBox>& columns) {
  for (size_t i = 0; i + 1 < rows.size(); ++i) {
    const double mid = (rows[i].y1 + rows[i + 1].y0) / 2.0;
    rows[i].y1 = mid;
    rows[i + 1].y0 = mid;
  }
  for (size_t i = 0; i + 1 < columns.size(); ++i) {
    const double mid = (columns[i].x1 + columns[i + 1].x0) / 2.0;
    columns[i].x1 = mid;
    columns[i + 1].x0 = mid;
  }
}

std::vector<Entity> assign_cell_ranges(std::span<const Entity> cells,
                                       std::span<const BBox> rows,
                                       std::span<const BBox> columns) {
  std::vector<Entity> out;
  for (const Entity& cell : cells) {
    int r0 = -1, r1 = -1, c0 = -1, c1 = -1;
    for (size_t i = 0; i < rows.size(); ++i) {
      const double ov = overlap_1d(cell.bbox.y0, cell.bbox.y1, rows[i].y0, rows[i].y1);
      if (ov >= 0.5 * rows[i].height()) {
        if (r0 < 0) r0 = static_cast<int>(i);
        r1 = static_cast<int>(i);
      }
    }
    for (size_t j = 0; j < columns.size(); ++j) {
      const double ov =
          overlap_1d(cell.bbox.x0, cell.bbox.x1, columns[j].x0, columns[j].x1);
      if (ov >= 0.5 * columns[j].width()) {
        if (c0 < 0) c0 = static_cast<int>(j);
        c1 = static_cast<int>(j);
      }
    }
    if (r0 < 0 || c0 < 0) continue;  // matches no grid position

    Entity assigned = cell;
    assigned.cell_range = CellRange{r0, r1, c0, c1};
    if (r1 > r0 || c1 > c0) {
      assigned.bbox =
          BBox{columns[c0].x0, rows[r0].y0, columns[c1].x1, rows[r1].y1};
    }
    out.push_back(std::move(assigned));
  }
  return out;
}

TableGrid fill_grid(std::vector<BBox> rows, std::vector<BBox> columns,
                    std::vector<Entity> spanning_cells) {
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(columns.size());
  std::vector<char> covered(static_cast<size_t>(nr) * nc, 0);
  std::unordered_set<std::string> ids;
  for (const Entity& cell : spanning_cells) {
    ids.insert(cell.id);
    if (!cell.cell_range) continue;
    for (int r = cell.cell_range->row_start; r <= cell.cell_range->row_end; ++r)
      for (int c = cell.cell_range->col_start; c <= cell.cell_range->col_end; ++c)
        if (r >= 0 && r < nr && c >= 0 && c < nc) covered[r * nc + c] = 1;
  }

  TableGrid grid;
  grid.cells = std::move(spanning_cells);
  for (int r = 0; r < nr; ++r) {
    for (int c = 0; c < nc; ++c) {
      if (covered[r * nc + c]) continue;
      Entity cell;
      cell.id = "grid_r" + std::to_string(r) + "c" + std::to_string(c);
      while (ids.count(cell.id)) cell.id += "_";
      ids.insert(cell.id);
      cell.category = Category::table_cell;
      cell.bbox = BBox{columns[c].x0, rows[r].y0, columns[c].x1, rows[r].y1};
      cell.cell_range = CellRange{r, r, c, c};
      grid.cells.push_back(std::move(cell));
    }
  }

  std::sort(grid.cells.begin(), grid.cells.end(), [](const Entity& a, const Entity& b) {
    const CellRange& ra = *a.cell_range;
    const CellRange& rb = *b.cell_range;
    return std::tie(ra.row_start, ra.col_start, ra.row_end, ra.col_end, a.id) <
           std::tie(rb.row_start, rb.col_start, rb.row_end, rb.col_end, b.id);
  });

  std::vector<BBox> all(rows.begin(), rows.end());
  all.insert(all.end(), columns.begin(), columns.end());
  grid.tabular = union_bbox(all);
  grid.rows = std::move(rows);
  grid.columns = std::move(columns);
  return grid;
}

TableGrid parse_table(std::span<const Entity> detections, double centroid_gap) {
  std::vector<BBox> rows, cols;
  std::vector<Entity> cells;
  for (const Entity& e : detections) {
    switch (e.category) {
      case Category::table_row: rows.push_back(e.bbox); break;
      case Category::table_column: cols.push_back(e.bbox); break;
      case Category::table_cell: cells.push_back(e); break;
      default: break;  // captions and strays are not part of the grid
    }
  }

  std::sort(rows.begin(), rows.end(),
            [](const BBox& a, const BBox& b) { return centroid_y(a) < centroid_y(b); });
  std::sort(cols.begin(), cols.end(),
            [](const BBox& a, const BBox& b) { return centroid_x(a) < centroid_x(b); });
  rows = resolve_nested_boxes(std::move(rows));
  cols = resolve_nested_boxes(std::move(cols));

  if (rows.empty() || cols.empty()) {
    std::vector<BBox> cell_boxes;
    for (const Entity& c : cells) cell_boxes.push_back(c.bbox);
    auto [srows, scols] = rows_cols_from_cells(cell_boxes, centroid_gap);
    if (rows.empty()) rows = std::move(srows);
    if (cols.empty()) cols = std::move(scols);
  }
  if (rows.empty() || cols.empty())
    throw std::invalid_argument("parse_table: degenerate table (no usable rows or columns)");

  normalize_extents(rows, cols);
  center_boundaries(rows, cols);

  std::vector<Entity> ranged = assign_cell_ranges(cells, rows, cols);
  std::vector<Entity> spanning;
  for (Entity& cell : ranged) {
    const CellRange& cr = *cell.cell_range;
    if (cr.row_end > cr.row_start || cr.col_end > cr.col_start)
      spanning.push_back(std::move(cell));
  }
  return fill_grid(std::move(rows), std::move(cols), std::move(spanning));
}

std::vector<CellTextMatch> match_cells_to_text(const TableGrid& grid,
                                               std::span<const Entity> text_boxes,
                                               double min_coverage) {
  std::vector<CellTextMatch> out;
  for (const Entity& text : text_boxes) {
    if (is_degenerate(text.bbox)) continue;
    const Entity* best = nullptr;
    double best_gamma = 0.0;
    for (const Entity& cell : grid.cells) {
      const auto inter = intersection(cell.bbox, text.bbox);
      if (!inter) continue;
      const double gamma = area(*inter) / area(text.bbox);
      if (gamma < min_coverage) continue;
      if (!best || gamma > best_gamma) {
        best = &cell;
        best_gamma = gamma;
        continue;
      }
      if (gamma == best_gamma) {
        const CellRange& a = *cell.cell_range;
        const CellRange& b = *best->cell_range;
        if (std::tie(a.row_start, a.col_start, cell.id) <
            std::tie(b.row_start, b.col_start, best->id)) {
          best = &cell;
        }
      }
    }
    if (best) out.push_back({best->id, text.id, best_gamma});
  }
  return out;
}

}  // namespace docstruct
