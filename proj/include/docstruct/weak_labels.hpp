#pragma once

#include <span>
#include <string>
#include <vector>

#include "docstruct/grammar.hpp"
#include "docstruct/model.hpp"
#include "docstruct/relations.hpp"
#include "docstruct/weak_labels_types.hpp"

namespace docstruct {

struct WeakConfig {
  // Tabular children at least this wide, relative to the tabular, are rows
  // rather than cells.
  double row_width_fraction = 0.95;
  // Lines narrower than this fraction of the column's median line width
  // qualify for equation runs.
  double equation_width_fraction = 0.70;
  // ... when their left edge also sits at least this fraction of the column
  // width away from the column's left margin.
  double equation_min_indent = 0.05;
  // A narrow box starting in the rightmost part of the column (past this
  // fraction of its width) is an equation label, not a formula.
  double label_alignment = 0.85;
  // Paragraph break: vertical gap above this multiple of the column's
  // median line height starts a new content block.
  double block_gap_factor = 1.5;
  // Centroid grouping distance for row/column synthesis.
  double centroid_gap = 5.0;
  // Column membership threshold (shared with relation ordering).
  double tau_overlap = 0.7;
  // Children of floats at most this thin in either direction are noise.
  double min_child_extent = 2.0;
};

// How a node came to be. Cleaning treats record boxes and synthesized
// rows/columns as the concrete leaves; scope entities live only through
// such descendants.
enum class WeakOrigin { record, scope, synthesized };

struct WeakNode {
  Entity entity;
  WeakOrigin origin = WeakOrigin::record;
  int parent = -1;
  std::vector<int> children;
  bool alive = true;
};

struct WeakForest {
  std::vector<WeakNode> nodes;
  std::vector<int> roots;

  int add(Entity e, WeakOrigin origin, int parent);
  void kill_subtree(int idx);
  bool alive_at(int idx) const { return idx >= 0 && nodes[idx].alive; }
};

// Scope mapping: recognized environments and commands become entities,
// text tokens become content lines under the innermost open scope. Scopes
// close with the union box of their children; empty scopes vanish.
WeakForest map_records(std::span<const RenderRecord> records,
                       std::vector<std::string>* warnings = nullptr);

// Narrow, indented line runs inside text columns turn into equation
// entities wrapping formula lines and right-aligned label boxes.
void detect_equations(WeakForest& forest, PageGeometry page, const WeakConfig& config);

// Consecutive same-column content lines under the top level or a section
// merge into content blocks; inside a bibliography they merge into
// bibliography blocks instead.
void build_sections_and_blocks(WeakForest& forest, PageGeometry page,
                               const WeakConfig& config);

// Non-caption children of a tabular spanning (almost) its width are rows,
// the rest are cells.
Category classify_table_child(const BBox& child, const BBox& tabular,
                              double row_width_fraction = 0.95);
void classify_table_children(WeakForest& forest, const WeakConfig& config);

// Row and column entities synthesized from each tabular's cells, appended
// as cell siblings.
void synthesize_rows_cols(WeakForest& forest, const WeakConfig& config);

// Noise removal: thin float children, caption boxes swallowing their
// siblings, surplus same-category leaf boxes (relabeled to content lines),
// duplicate (category, bbox) pairs, scopes with no concrete leaf, roots
// outside the whitelist, and anything off-page or zero-area. Parent boxes
// are re-derived from the survivors.
void clean_labels(WeakForest& forest, PageGeometry page, const WeakConfig& config);

bool is_whitelisted_root(Category c);

struct WeakLabel {
  Entity entity;
  bool noisy = true;
};

struct WeakLabelResult {
  std::vector<WeakLabel> labels;
  DocStructure structure;
};

WeakLabelResult generate_weak_labels(std::span<const RenderRecord> records,
                                     PageGeometry page, const WeakConfig& config = {},
                                     std::vector<std::string>* warnings = nullptr);

}  // namespace docstruct
