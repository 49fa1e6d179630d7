#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "docstruct/category.hpp"
#include "docstruct/geometry.hpp"

namespace docstruct {

// Grid span of a table cell, inclusive on both ends, 0-based.
struct CellRange {
  int row_start = 0;
  int row_end = 0;
  int col_start = 0;
  int col_end = 0;

  bool operator==(const CellRange&) const = default;
};

struct Entity {
  std::string id;
  Category category = Category::content_block;
  BBox bbox;
  std::optional<double> confidence;
  std::optional<CellRange> cell_range;

  bool operator==(const Entity&) const = default;
};

enum class RelationType {
  parent_of,
  followed_by,
};

std::string_view to_string(RelationType t);
std::optional<RelationType> relation_type_from_string(std::string_view name);

struct Relation {
  std::string subject;
  std::string object;
  RelationType type = RelationType::parent_of;

  bool operator==(const Relation&) const = default;
};

// A parsed page: a forest of entities. parent_of edges give the nesting,
// followed_by edges chain consecutive siblings. Meta entities (header,
// footer, ...) appear in no relation at all.
struct DocStructure {
  double page_width = 0.0;
  double page_height = 0.0;
  std::vector<Entity> entities;
  std::vector<Relation> relations;

  const Entity* find(const std::string& id) const;
  Entity* find(const std::string& id);
};

// Lookup tables over one structure. Invalidated by any mutation.
struct StructureIndex {
  std::unordered_map<std::string, size_t> by_id;
  std::unordered_map<std::string, std::string> parent;
  std::unordered_map<std::string, std::vector<std::string>> child_ids;
  std::unordered_map<std::string, std::string> next_sibling;
  std::unordered_map<std::string, std::string> prev_sibling;

  bool has_parent(const std::string& id) const { return parent.count(id) > 0; }
};

StructureIndex build_index(const DocStructure& s);

// Direct children of `id`, ordered by the followed_by chain; children that
// do not appear in the chain come last, sorted by (y0, x0, id).
std::vector<std::string> children_in_order(const DocStructure& s,
                                           const StructureIndex& index,
                                           const std::string& id);

// Entities without a parent, in entity-list order.
std::vector<std::string> root_ids(const DocStructure& s,
                                  const StructureIndex& index);

struct Violation {
  std::string rule;
  std::string subject;
  std::string object;
  std::string detail;
};

// Structural well-formedness: ids resolve and are unique, no self
// relations, single parent per entity, no parent cycles, followed_by only
// between same-parent entities with at most one predecessor/successor, and
// meta entities untouched by relations. Grammar conformance is a separate
// check.
std::vector<Violation> validate_structure(const DocStructure& s);

}  // namespace docstruct
