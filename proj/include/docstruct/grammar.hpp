#pragma once

#include <bitset>
#include <map>
#include <string>
#include <vector>

#include "docstruct/category.hpp"
#include "docstruct/model.hpp"

namespace docstruct {

// Which nestings a document may use. Rules marked "inferred" in the config
// extend the core table to the text hierarchy (blocks, lines, sections...)
// and can be audited or overridden without a code change.
class Grammar {
 public:
  // Parses the bundled declarative config.
  static const Grammar& default_grammar();

  static Grammar from_json_text(const std::string& text);
  static Grammar from_file(const std::string& path);

  // The bundled config, verbatim.
  static const std::string& default_config_text();

  bool allowed_child(Category parent, Category child) const;
  bool is_meta(Category c) const;
  bool is_float(Category c) const;

  // Cap on children of a given category under one parent (only the
  // figure / figure_graphic pair in the default config). -1 means "no cap".
  int max_count(Category parent, Category child) const;

  // Sibling orderings preferred inside a parent: (parent, first, then).
  struct OrderingPreference {
    Category parent;
    Category first;
    Category then;
  };
  const std::vector<OrderingPreference>& ordering_preferences() const {
    return ordering_;
  }

 private:
  std::array<std::bitset<kCategoryCount>, kCategoryCount> allowed_{};
  std::bitset<kCategoryCount> meta_{};
  std::bitset<kCategoryCount> floats_{};
  std::map<std::pair<int, int>, int> max_counts_;
  std::vector<OrderingPreference> ordering_;
};

// Grammar conformance of an already well-formed structure: every parent_of
// edge must be an allowed nesting and per-parent child counts must respect
// the grammar's caps. Violations are sorted by subject id.
std::vector<Violation> check_conformance(const DocStructure& s, const Grammar& g);

}  // namespace docstruct
