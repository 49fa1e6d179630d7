#include "docstruct/category.hpp"

namespace docstruct {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kNames = {
    "content_block", "table",          "table_row",
    "table_column",  "table_cell",     "tabular",
    "figure",        "heading",        "abstract",
    "equation",      "itemize",        "item",
    "bibliography_block", "table_caption", "figure_graphic",
    "figure_caption", "header",        "footer",
    "page_number",   "date",           "keywords",
    "author",        "affiliation",    "content_line",
    "section",       "bibliography",   "equation_formula",
    "equation_label", "code",          "content_lines",
    "title",         "caption",        "meta",
};

}  // namespace

std::string_view to_string(Category c) {
  return kNames[static_cast<int>(c)];
}

std::optional<Category> category_from_string(std::string_view name) {
  for (int i = 0; i < kCategoryCount; ++i) {
    if (kNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

bool is_meta_category(Category c) {
  switch (c) {
    case Category::header:
    case Category::footer:
    case Category::page_number:
    case Category::date:
    case Category::keywords:
      return true;
    default:
      return false;
  }
}

const std::array<Category, kCategoryCount>& all_categories() {
  static const std::array<Category, kCategoryCount> cats = [] {
    std::array<Category, kCategoryCount> a{};
    for (int i = 0; i < kCategoryCount; ++i) a[i] = static_cast<Category>(i);
    return a;
  }();
  return cats;
}

}  // namespace docstruct
