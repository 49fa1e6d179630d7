#include "docstruct/weak_labels.hpp"

#include "docstruct/table_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace docstruct {

namespace {

bool position_less(const Entity& a, const Entity& b) {
  return std::tie(a.bbox.y0, a.bbox.x0, a.id) < std::tie(b.bbox.y0, b.bbox.x0, b.id);
}

std::string strip_star(std::string name) {
  while (!name.empty() && name.back() == '*') name.pop_back();
  return name;
}

std::optional<Category> environment_category(const std::string& raw) {
  const std::string env = strip_star(raw);
  if (env == "figure") return Category::figure;
  if (env == "table") return Category::table;
  if (env == "tabular" || env == "tabularx" || env == "longtable")
    return Category::tabular;
  if (env == "itemize" || env == "enumerate" || env == "description")
    return Category::itemize;
  if (env == "abstract") return Category::abstract;
  if (env == "thebibliography" || env == "bibliography")
    return Category::bibliography;
  return std::nullopt;
}

bool is_sectioning_command(const std::string& raw) {
  const std::string cmd = strip_star(raw);
  return cmd == "section" || cmd == "subsection" || cmd == "subsubsection" ||
         cmd == "chapter" || cmd == "paragraph";
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

int WeakForest::add(Entity e, WeakOrigin origin, int parent) {
  const int idx = static_cast<int>(nodes.size());
  WeakNode node;
  node.entity = std::move(e);
  node.origin = origin;
  node.parent = parent;
  nodes.push_back(std::move(node));
  if (parent >= 0)
    nodes[parent].children.push_back(idx);
  else
    roots.push_back(idx);
  return idx;
}

void WeakForest::kill_subtree(int idx) {
  if (idx < 0 || !nodes[idx].alive) return;
  nodes[idx].alive = false;
  for (int c : nodes[idx].children) kill_subtree(c);
}

WeakForest map_records(std::span<const RenderRecord> records,
                       std::vector<std::string>* warnings) {
  WeakForest forest;
  int next_id = 0;
  auto fresh_id = [&] {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%04d", next_id++);
    return std::string(buf);
  };

  // A frame per open scope. Transparent frames come from unrecognized
  // environments; soft frames (item, section) close implicitly.
  struct Frame {
    int node = -1;
    bool transparent = false;
    bool soft = false;
    std::string env;
  };
  std::vector<Frame> stack;

  auto attach_target = [&]() -> int {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
      if (!it->transparent) return it->node;
    return -1;
  };

  auto enclosing_category = [&](Category c) -> bool {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
      if (!it->transparent && forest.nodes[it->node].entity.category == c) return true;
    return false;
  };

  auto add_leaf = [&](Category cat, const BBox& bbox) {
    Entity e;
    e.id = fresh_id();
    e.category = cat;
    e.bbox = bbox;
    forest.add(std::move(e), WeakOrigin::record, attach_target());
  };

  auto open_scope = [&](Category cat, bool soft, const std::string& env) {
    Entity e;
    e.id = fresh_id();
    e.category = cat;
    const int idx = forest.add(std::move(e), WeakOrigin::scope, attach_target());
    stack.push_back({idx, false, soft, env});
  };

  // Finalize the top frame: a scope's box is the union of its children.
  auto close_top = [&] {
    const Frame frame = stack.back();
    stack.pop_back();
    if (frame.transparent) return;
    WeakNode& node = forest.nodes[frame.node];
    std::vector<BBox> boxes;
    for (int c : node.children)
      if (forest.nodes[c].alive) boxes.push_back(forest.nodes[c].entity.bbox);
    if (boxes.empty()) {
      node.alive = false;
      if (node.parent < 0)
        std::erase(forest.roots, frame.node);
      else
        std::erase(forest.nodes[node.parent].children, frame.node);
    } else {
      node.entity.bbox = union_bbox(boxes);
    }
  };

  auto close_soft_frames = [&] {
    while (!stack.empty() && stack.back().soft) close_top();
  };

  for (const RenderRecord& r : records) {
    switch (r.kind) {
      case TokenKind::text_token:
        add_leaf(Category::content_line, r.bbox);
        break;
      case TokenKind::environment_begin: {
        const std::string env = r.env_name.value_or("");
        if (auto cat = environment_category(env)) {
          open_scope(*cat, false, env);
        } else {
          stack.push_back({-1, true, false, env});
        }
        break;
      }
      case TokenKind::environment_end: {
        close_soft_frames();
        if (stack.empty()) {
          if (warnings)
            warnings->push_back("map_records: environment_end without matching begin (" +
                                r.env_name.value_or("?") + ")");
          break;
        }
        if (warnings && r.env_name &&
            strip_star(stack.back().env) != strip_star(*r.env_name)) {
          warnings->push_back("map_records: environment_end '" + *r.env_name +
                              "' closes '" + stack.back().env + "'");
        }
        close_top();
        break;
      }
      case TokenKind::command: {
        const std::string cmd = r.command_name.value_or("");
        if (cmd == "includegraphics" && enclosing_category(Category::figure)) {
          add_leaf(Category::figure_graphic, r.bbox);
        } else if (cmd == "caption" && enclosing_category(Category::figure)) {
          add_leaf(Category::figure_caption, r.bbox);
        } else if (cmd == "caption" && (enclosing_category(Category::table) ||
                                        enclosing_category(Category::tabular))) {
          add_leaf(Category::table_caption, r.bbox);
        } else if (cmd == "item" && enclosing_category(Category::itemize)) {
          if (!stack.empty() && stack.back().soft &&
              forest.nodes[stack.back().node].entity.category == Category::item)
            close_top();
          open_scope(Category::item, true, "item");
        } else if (is_sectioning_command(cmd)) {
          close_soft_frames();
          open_scope(Category::section, true, "section");
          add_leaf(Category::heading, r.bbox);
        } else {
          add_leaf(Category::content_line, r.bbox);
        }
        break;
      }
    }
  }
  while (!stack.empty()) close_top();
  return forest;
}

namespace {

// Hosts whose direct content lines take part in equation detection and
// block building: the top level, sections, items, and the abstract. Lines
// inside floats, tabulars, and bibliographies are handled by their own
// rules.
bool hosts_text_lines(const WeakForest& forest, int idx) {
  if (idx < 0) return true;
  switch (forest.nodes[idx].entity.category) {
    case Category::section:
    case Category::item:
    case Category::abstract:
      return true;
    default:
      return false;
  }
}

// Everywhere flowing text can live, bibliographies included; used for the
// page-wide line statistics so bibliography-only pages still get a usable
// paragraph gap.
bool hosts_flowing_lines(const WeakForest& forest, int idx) {
  return hosts_text_lines(forest, idx) ||
         (idx >= 0 && forest.nodes[idx].entity.category == Category::bibliography);
}

std::vector<int> host_nodes(const WeakForest& forest, bool (*pred)(const WeakForest&, int)) {
  std::vector<int> hosts{-1};
  for (size_t i = 0; i < forest.nodes.size(); ++i)
    if (forest.nodes[i].alive && pred(forest, static_cast<int>(i)))
      hosts.push_back(static_cast<int>(i));
  return hosts;
}

std::vector<int> line_children(const WeakForest& forest, int host) {
  std::vector<int> lines;
  const std::vector<int>* kids;
  if (host < 0) {
    kids = &forest.roots;
  } else {
    kids = &forest.nodes[host].children;
  }
  for (int c : *kids) {
    if (!forest.nodes[c].alive) continue;
    if (forest.nodes[c].entity.category != Category::content_line) continue;
    if (!forest.nodes[c].children.empty()) continue;
    lines.push_back(c);
  }
  std::sort(lines.begin(), lines.end(), [&](int a, int b) {
    return position_less(forest.nodes[a].entity, forest.nodes[b].entity);
  });
  return lines;
}

struct ColumnStats {
  double x0 = 0, x1 = 0;
  double median_width = 0, median_height = 0;
  double width() const { return x1 - x0; }
};

// Per-layout-column statistics pooled over every hosted content line on
// the page.
std::map<int, ColumnStats> column_stats(const WeakForest& forest, PageGeometry page,
                                        const WeakConfig& config) {
  std::map<int, std::vector<const BBox*>> pools;
  for (int host : host_nodes(forest, hosts_flowing_lines)) {
    for (int li : line_children(forest, host)) {
      const BBox& b = forest.nodes[li].entity.bbox;
      pools[static_cast<int>(layout_group_of(b, page.width, config.tau_overlap))]
          .push_back(&b);
    }
  }
  std::map<int, ColumnStats> stats;
  for (auto& [col, boxes] : pools) {
    std::vector<double> x0s, x1s, ws, hs;
    for (const BBox* b : boxes) {
      x0s.push_back(b->x0);
      x1s.push_back(b->x1);
      ws.push_back(b->width());
      hs.push_back(b->height());
    }
    ColumnStats cs;
    cs.x0 = median(std::move(x0s));
    cs.x1 = median(std::move(x1s));
    cs.median_width = median(std::move(ws));
    cs.median_height = median(std::move(hs));
    stats[col] = cs;
  }
  return stats;
}

// Moves `child` from wherever it hangs to `new_parent`, placing the new
// node at the position previously held by `position_of` in the old list.
void reparent_into(WeakForest& forest, int child, int new_parent) {
  WeakNode& node = forest.nodes[child];
  if (node.parent < 0)
    std::erase(forest.roots, child);
  else
    std::erase(forest.nodes[node.parent].children, child);
  node.parent = new_parent;
  forest.nodes[new_parent].children.push_back(child);
}

void insert_at_position(WeakForest& forest, int node, int parent, int before_of) {
  // `node` was appended by add(); move it right before where `before_of`
  // used to sit (which is still in the list at this point).
  auto& list = parent < 0 ? forest.roots : forest.nodes[parent].children;
  std::erase(list, node);
  auto it = std::find(list.begin(), list.end(), before_of);
  list.insert(it, node);
}

}  // namespace

void detect_equations(WeakForest& forest, PageGeometry page, const WeakConfig& config) {
  const auto stats = column_stats(forest, page, config);
  int next_eq = 0;

  for (int host : host_nodes(forest, hosts_text_lines)) {
    auto lines = line_children(forest, host);
    std::map<int, std::vector<int>> by_column;
    for (int li : lines) {
      const BBox& b = forest.nodes[li].entity.bbox;
      by_column[static_cast<int>(layout_group_of(b, page.width, config.tau_overlap))]
          .push_back(li);
    }

    for (auto& [col, col_lines] : by_column) {
      auto sit = stats.find(col);
      if (sit == stats.end() || sit->second.median_width <= 0) continue;
      const ColumnStats& cs = sit->second;

      auto is_narrow = [&](const BBox& b) {
        return b.width() < config.equation_width_fraction * cs.median_width;
      };
      auto is_indented = [&](const BBox& b) {
        return b.x0 - cs.x0 > config.equation_min_indent * cs.width();
      };
      auto is_label = [&](const BBox& b) {
        return is_narrow(b) && b.x0 >= cs.x0 + config.label_alignment * cs.width();
      };
      auto qualifies = [&](int li) {
        const BBox& b = forest.nodes[li].entity.bbox;
        return is_narrow(b) && is_indented(b);
      };

      const double max_gap = config.block_gap_factor * cs.median_height;
      size_t start = 0;
      while (start < col_lines.size()) {
        if (!qualifies(col_lines[start])) {
          ++start;
          continue;
        }
        size_t end = start + 1;
        while (end < col_lines.size() && qualifies(col_lines[end])) {
          const BBox& prev = forest.nodes[col_lines[end - 1]].entity.bbox;
          const BBox& cur = forest.nodes[col_lines[end]].entity.bbox;
          if (cur.y0 - prev.y1 > max_gap) break;
          ++end;
        }

        bool any_formula = false;
        for (size_t i = start; i < end; ++i)
          if (!is_label(forest.nodes[col_lines[i]].entity.bbox)) any_formula = true;
        if (!any_formula) {
          start = end;
          continue;
        }

        Entity eq;
        eq.id = "eq" + std::to_string(next_eq++);
        eq.category = Category::equation;
        std::vector<BBox> boxes;
        for (size_t i = start; i < end; ++i)
          boxes.push_back(forest.nodes[col_lines[i]].entity.bbox);
        eq.bbox = union_bbox(boxes);
        const int eq_idx = forest.add(std::move(eq), WeakOrigin::scope, host);
        insert_at_position(forest, eq_idx, host, col_lines[start]);
        for (size_t i = start; i < end; ++i) {
          WeakNode& line = forest.nodes[col_lines[i]];
          line.entity.category = is_label(line.entity.bbox)
                                     ? Category::equation_label
                                     : Category::equation_formula;
          reparent_into(forest, col_lines[i], eq_idx);
        }
        start = end;
      }
    }
  }
}

namespace {

bool hosts_blocks(const WeakForest& forest, int idx) {
  if (idx < 0) return true;
  const Category c = forest.nodes[idx].entity.category;
  return c == Category::section || c == Category::bibliography;
}

}  // namespace

void build_sections_and_blocks(WeakForest& forest, PageGeometry page,
                               const WeakConfig& config) {
  const auto stats = column_stats(forest, page, config);
  int next_block = 0;

  for (int host : host_nodes(forest, hosts_blocks)) {
    const bool in_bibliography =
        host >= 0 && forest.nodes[host].entity.category == Category::bibliography;
    auto lines = line_children(forest, host);
    if (lines.empty()) continue;

    // Lines flow within a layout column, so runs are built per column
    // (otherwise two-column text would interleave) and break on a
    // paragraph-sized vertical gap.
    std::map<int, std::vector<int>> by_column;
    for (int li : lines) {
      const BBox& b = forest.nodes[li].entity.bbox;
      by_column[static_cast<int>(layout_group_of(b, page.width, config.tau_overlap))]
          .push_back(li);
    }
    std::vector<std::vector<int>> runs;
    for (auto& [col, col_lines] : by_column) {
      double max_gap = 0;
      if (auto sit = stats.find(col); sit != stats.end())
        max_gap = config.block_gap_factor * sit->second.median_height;
      for (size_t i = 0; i < col_lines.size(); ++i) {
        const BBox& b = forest.nodes[col_lines[i]].entity.bbox;
        bool fresh = i == 0;
        if (!fresh) {
          const BBox& prev = forest.nodes[col_lines[i - 1]].entity.bbox;
          fresh = b.y0 - prev.y1 > max_gap;
        }
        if (fresh) runs.emplace_back();
        runs.back().push_back(col_lines[i]);
      }
    }

    for (const auto& run : runs) {
      Entity block;
      block.id = (in_bibliography ? "bib" : "blk") + std::to_string(next_block++);
      block.category =
          in_bibliography ? Category::bibliography_block : Category::content_block;
      std::vector<BBox> boxes;
      for (int li : run) boxes.push_back(forest.nodes[li].entity.bbox);
      block.bbox = union_bbox(boxes);
      const int block_idx = forest.add(std::move(block), WeakOrigin::scope, host);
      insert_at_position(forest, block_idx, host, run.front());
      for (int li : run) reparent_into(forest, li, block_idx);
    }
  }
}

Category classify_table_child(const BBox& child, const BBox& tabular,
                              double row_width_fraction) {
  return child.width() >= row_width_fraction * tabular.width()
             ? Category::table_row
             : Category::table_cell;
}

void classify_table_children(WeakForest& forest, const WeakConfig& config) {
  for (WeakNode& node : forest.nodes) {
    if (!node.alive || node.entity.category != Category::tabular) continue;
    for (int c : node.children) {
      WeakNode& child = forest.nodes[c];
      if (!child.alive) continue;
      if (child.entity.category == Category::table_caption ||
          child.entity.category == Category::figure_caption)
        continue;
      child.entity.category = classify_table_child(child.entity.bbox, node.entity.bbox,
                                                   config.row_width_fraction);
    }
  }
}

void synthesize_rows_cols(WeakForest& forest, const WeakConfig& config) {
  const size_t n = forest.nodes.size();
  int next_rc = 0;
  for (size_t i = 0; i < n; ++i) {
    WeakNode& node = forest.nodes[i];
    if (!node.alive || node.entity.category != Category::tabular) continue;
    std::vector<BBox> cells;
    for (int c : node.children) {
      const WeakNode& child = forest.nodes[c];
      if (child.alive && child.entity.category == Category::table_cell)
        cells.push_back(child.entity.bbox);
    }
    if (cells.empty()) continue;
    auto [rows, cols] = rows_cols_from_cells(cells, config.centroid_gap);
    for (const BBox& r : rows) {
      Entity e;
      e.id = "row" + std::to_string(next_rc++);
      e.category = Category::table_row;
      e.bbox = r;
      forest.add(std::move(e), WeakOrigin::synthesized, static_cast<int>(i));
    }
    for (const BBox& c : cols) {
      Entity e;
      e.id = "col" + std::to_string(next_rc++);
      e.category = Category::table_column;
      e.bbox = c;
      forest.add(std::move(e), WeakOrigin::synthesized, static_cast<int>(i));
    }
  }
}

bool is_whitelisted_root(Category c) {
  switch (c) {
    case Category::itemize:
    case Category::figure:
    case Category::table:
    case Category::equation:
    case Category::heading:
    case Category::content_block:
    case Category::bibliography:
    case Category::abstract:
      return true;
    default:
      return false;
  }
}

namespace {

bool is_grid_category(Category c) {
  return c == Category::table_cell || c == Category::table_row ||
         c == Category::table_column;
}

bool off_page(const BBox& b, PageGeometry page) {
  return b.x0 < 0 || b.y0 < 0 || b.x1 > page.width || b.y1 > page.height;
}

// Splice: node dies, its children take its place under its parent.
void dissolve_node(WeakForest& forest, int idx) {
  WeakNode& node = forest.nodes[idx];
  node.alive = false;
  auto& list = node.parent < 0 ? forest.roots : forest.nodes[node.parent].children;
  auto it = std::find(list.begin(), list.end(), idx);
  std::vector<int> kids = node.children;
  for (int c : kids) forest.nodes[c].parent = node.parent;
  it = list.erase(it);
  list.insert(it, kids.begin(), kids.end());
  node.children.clear();
}

bool has_concrete_leaf(const WeakForest& forest, int idx) {
  const WeakNode& node = forest.nodes[idx];
  if (!node.alive) return false;
  if (node.origin != WeakOrigin::scope) return true;
  for (int c : node.children)
    if (has_concrete_leaf(forest, c)) return true;
  return false;
}

}  // namespace

void clean_labels(WeakForest& forest, PageGeometry page, const WeakConfig& config) {
  // Thin children of floats.
  for (size_t i = 0; i < forest.nodes.size(); ++i) {
    const WeakNode& node = forest.nodes[i];
    if (!node.alive) continue;
    const Category c = node.entity.category;
    if (c != Category::figure && c != Category::table && c != Category::tabular)
      continue;
    for (int ci : std::vector<int>(node.children)) {
      const BBox& b = forest.nodes[ci].entity.bbox;
      if (forest.nodes[ci].alive &&
          (b.width() <= config.min_child_extent || b.height() <= config.min_child_extent)) {
        forest.kill_subtree(ci);
        std::erase(forest.nodes[i].children, ci);
      }
    }
  }

  // Caption boxes that swallow a sibling.
  for (size_t i = 0; i < forest.nodes.size(); ++i) {
    const WeakNode& node = forest.nodes[i];
    if (!node.alive) continue;
    const Category c = node.entity.category;
    if (c != Category::figure && c != Category::table) continue;
    std::vector<int> to_drop;
    for (int ci : node.children) {
      const WeakNode& cap = forest.nodes[ci];
      if (!cap.alive) continue;
      if (cap.entity.category != Category::figure_caption &&
          cap.entity.category != Category::table_caption)
        continue;
      for (int si : node.children) {
        const WeakNode& sib = forest.nodes[si];
        if (si == ci || !sib.alive) continue;
        if (sib.entity.category == Category::figure_caption ||
            sib.entity.category == Category::table_caption)
          continue;
        if (contains(cap.entity.bbox, sib.entity.bbox)) {
          to_drop.push_back(ci);
          break;
        }
      }
    }
    for (int ci : to_drop) {
      forest.kill_subtree(ci);
      std::erase(forest.nodes[i].children, ci);
    }
  }

  // At most one leaf box of a given semantic kind per parent: surplus
  // same-category record leaves turn back into content lines.
  for (WeakNode& node : forest.nodes) {
    if (!node.alive) continue;
    std::map<Category, int> seen;
    for (int ci : node.children) {
      WeakNode& child = forest.nodes[ci];
      if (!child.alive || child.origin != WeakOrigin::record) continue;
      if (!child.children.empty()) continue;
      const Category cc = child.entity.category;
      if (cc == Category::content_line || is_grid_category(cc)) continue;
      if (++seen[cc] > 1) child.entity.category = Category::content_line;
    }
  }

  // The remaining rules interact (re-derived parent boxes can create new
  // duplicates or lose their last leaf), so they run to a fixpoint.
  bool changed = true;
  while (changed) {
    changed = false;

    // Duplicate (category, bbox) pairs: the earliest node wins.
    {
      std::set<std::tuple<int, double, double, double, double>> seen;
      for (size_t i = 0; i < forest.nodes.size(); ++i) {
        WeakNode& node = forest.nodes[i];
        if (!node.alive) continue;
        const auto key =
            std::make_tuple(static_cast<int>(node.entity.category), node.entity.bbox.x0,
                            node.entity.bbox.y0, node.entity.bbox.x1, node.entity.bbox.y1);
        if (!seen.insert(key).second) {
          forest.kill_subtree(static_cast<int>(i));
          if (node.parent < 0)
            std::erase(forest.roots, static_cast<int>(i));
          else
            std::erase(forest.nodes[node.parent].children, static_cast<int>(i));
          changed = true;
        }
      }
    }

    // Scopes with no concrete leaf below them.
    for (size_t i = 0; i < forest.nodes.size(); ++i) {
      WeakNode& node = forest.nodes[i];
      if (!node.alive || node.origin != WeakOrigin::scope) continue;
      if (has_concrete_leaf(forest, static_cast<int>(i))) continue;
      forest.kill_subtree(static_cast<int>(i));
      if (node.parent < 0)
        std::erase(forest.roots, static_cast<int>(i));
      else
        std::erase(forest.nodes[node.parent].children, static_cast<int>(i));
      changed = true;
    }

    // Only whitelisted roots survive; other roots dissolve so nested
    // whitelisted entities can surface, and plain leaves at the top die.
    {
      bool promoted = true;
      while (promoted) {
        promoted = false;
        for (int r : std::vector<int>(forest.roots)) {
          if (!forest.nodes[r].alive) {
            std::erase(forest.roots, r);
            continue;
          }
          if (is_whitelisted_root(forest.nodes[r].entity.category)) continue;
          if (forest.nodes[r].children.empty()) {
            forest.kill_subtree(r);
            std::erase(forest.roots, r);
          } else {
            dissolve_node(forest, r);
          }
          promoted = true;
          changed = true;
        }
      }
    }

    // Boxes outside the page or with no area.
    for (size_t i = 0; i < forest.nodes.size(); ++i) {
      WeakNode& node = forest.nodes[i];
      if (!node.alive) continue;
      if (!off_page(node.entity.bbox, page) && !is_degenerate(node.entity.bbox)) continue;
      if (node.children.empty()) {
        forest.kill_subtree(static_cast<int>(i));
        if (node.parent < 0)
          std::erase(forest.roots, static_cast<int>(i));
        else
          std::erase(forest.nodes[node.parent].children, static_cast<int>(i));
      } else {
        dissolve_node(forest, static_cast<int>(i));
      }
      changed = true;
    }

    // Scope boxes re-derived from their surviving children.
    for (size_t i = forest.nodes.size(); i-- > 0;) {
      WeakNode& node = forest.nodes[i];
      if (!node.alive || node.origin != WeakOrigin::scope) continue;
      std::vector<BBox> boxes;
      for (int c : node.children)
        if (forest.nodes[c].alive) boxes.push_back(forest.nodes[c].entity.bbox);
      if (boxes.empty()) continue;  // handled by the leafless-scope rule
      const BBox u = union_bbox(boxes);
      if (!(u == node.entity.bbox)) {
        node.entity.bbox = u;
        changed = true;
      }
    }
  }
}

namespace {

void emit_subtree(const WeakForest& forest, int idx, DocStructure& out,
                  std::vector<std::pair<int, std::vector<int>>>& groups) {
  const WeakNode& node = forest.nodes[idx];
  out.entities.push_back(node.entity);
  std::vector<int> kids;
  for (int c : node.children)
    if (forest.nodes[c].alive) kids.push_back(c);
  std::sort(kids.begin(), kids.end(), [&](int a, int b) {
    return position_less(forest.nodes[a].entity, forest.nodes[b].entity);
  });
  if (!kids.empty()) groups.push_back({idx, kids});
  for (int c : kids) emit_subtree(forest, c, out, groups);
}

}  // namespace

WeakLabelResult generate_weak_labels(std::span<const RenderRecord> records,
                                     PageGeometry page, const WeakConfig& config,
                                     std::vector<std::string>* warnings) {
  WeakForest forest = map_records(records, warnings);
  detect_equations(forest, page, config);
  build_sections_and_blocks(forest, page, config);
  classify_table_children(forest, config);
  synthesize_rows_cols(forest, config);
  clean_labels(forest, page, config);

  WeakLabelResult result;
  result.structure.page_width = page.width;
  result.structure.page_height = page.height;

  std::vector<int> roots;
  for (int r : forest.roots)
    if (forest.nodes[r].alive) roots.push_back(r);
  std::sort(roots.begin(), roots.end(), [&](int a, int b) {
    return position_less(forest.nodes[a].entity, forest.nodes[b].entity);
  });

  std::vector<std::pair<int, std::vector<int>>> groups;
  for (int r : roots) emit_subtree(forest, r, result.structure, groups);

  for (size_t i = 0; i + 1 < roots.size(); ++i)
    result.structure.relations.push_back({forest.nodes[roots[i]].entity.id,
                                          forest.nodes[roots[i + 1]].entity.id,
                                          RelationType::followed_by});
  for (const auto& [parent, kids] : groups) {
    for (int c : kids)
      result.structure.relations.push_back({forest.nodes[parent].entity.id,
                                            forest.nodes[c].entity.id,
                                            RelationType::parent_of});
    for (size_t i = 0; i + 1 < kids.size(); ++i)
      result.structure.relations.push_back({forest.nodes[kids[i]].entity.id,
                                            forest.nodes[kids[i + 1]].entity.id,
                                            RelationType::followed_by});
  }

  result.labels.reserve(result.structure.entities.size());
  for (const Entity& e : result.structure.entities)
    result.labels.push_back({e, true});
  return result;
}

}  // namespace docstruct
