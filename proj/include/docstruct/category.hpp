#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace docstruct {

// Every category an entity may carry. The first block is what detectors
// emit; the second is produced only by the weak-labeling pipeline; the
// trailing block covers categories that occur in annotation exports but
// that no heuristic consumes.
enum class Category {
  content_block,
  table,
  table_row,
  table_column,
  table_cell,
  tabular,
  figure,
  heading,
  abstract,
  equation,
  itemize,
  item,
  bibliography_block,
  table_caption,
  figure_graphic,
  figure_caption,
  header,
  footer,
  page_number,
  date,
  keywords,
  author,
  affiliation,
  // weak-label-only
  content_line,
  section,
  bibliography,
  equation_formula,
  equation_label,
  // representable but unused by the heuristics
  code,
  content_lines,
  title,
  caption,
  meta,
};

inline constexpr int kCategoryCount = static_cast<int>(Category::meta) + 1;

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view name);

// Page furniture: carries no relations anywhere in the pipeline.
bool is_meta_category(Category c);

const std::array<Category, kCategoryCount>& all_categories();

}  // namespace docstruct
