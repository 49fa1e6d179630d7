#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "docstruct/grammar.hpp"
#include "docstruct/model.hpp"

namespace docstruct {

struct PageGeometry {
  double width = 0.0;
  double height = 0.0;
};

// Floors for the overlap branch of candidate nesting: a subject may nest an
// object it does not fully contain when it covers at least min_overlap of
// the object and is more than min_area_ratio times its size.
struct NestingThresholds {
  double min_overlap = 0.45;
  double min_area_ratio = 1.2;
};

struct RelationConfig {
  NestingThresholds nesting;
  // Column membership: fraction of an entity's width that must fall on one
  // page half before the entity counts as left or right.
  double tau_overlap = 0.7;
};

struct CandidatePair {
  std::string subject;
  std::string object;

  bool operator==(const CandidatePair&) const = default;
};

// Candidate nesting pairs: full containment, or the overlap branch above.
// Pairs whose object box has zero area are skipped with a warning. Mutual
// pairs between equal boxes keep only the subject with the smaller id.
std::vector<CandidatePair> nesting_candidates(
    std::span<const Entity> entities, const NestingThresholds& thresholds,
    std::vector<std::string>* warnings = nullptr);

// Drops pairs the grammar does not allow.
std::vector<CandidatePair> grammar_filter(std::vector<CandidatePair> candidates,
                                          std::span<const Entity> entities,
                                          const Grammar& grammar);

// Transitive reduction of the candidate relation: (a, c) goes away whenever
// a path a -> ... -> c of length two or more exists.
std::vector<CandidatePair> prune_to_direct_children(
    std::vector<CandidatePair> candidates);

// At most one parent per object: ties broken by highest IoU with the
// object, then higher confidence, then larger subject area, then smaller
// subject id.
std::vector<CandidatePair> resolve_unique_parents(
    std::vector<CandidatePair> candidates, std::span<const Entity> entities);

enum class LayoutGroup { left, center, right };

LayoutGroup layout_group_of(const BBox& b, double page_width, double tau_overlap);

struct LayoutGroups {
  std::vector<std::string> left;
  std::vector<std::string> center;
  std::vector<std::string> right;
};

LayoutGroups assign_layout_groups(std::span<const Entity> entities,
                                  double page_width, double tau_overlap);

// Top-to-bottom, left-to-right; (y0, x0) ties broken by id.
std::vector<std::string> reading_order(std::span<const Entity> entities);

// Reading order of one sibling group. Column-aware unless the group's
// parent floats (figures and tables are read as a unit wherever they sit,
// so their children are ordered positionally only). Center entities cut the
// group into vertical bands; within a band the left column comes first,
// then the band's center entities, then the right column.
std::vector<std::string> ordered_group(std::span<const Entity> group,
                                       PageGeometry page, double tau_overlap,
                                       bool bypass_column_layout,
                                       std::optional<Category> parent_category,
                                       const Grammar* grammar);

// followed_by chains for every sibling group of an already nested
// structure. Meta entities take part in no chain.
std::vector<Relation> order_entities(const DocStructure& nested,
                                     const Grammar& grammar, PageGeometry page,
                                     double tau_overlap);

// The full pipeline: candidates -> grammar filter -> transitive reduction
// -> unique parents, then sibling ordering. Meta entities pass through
// relation-free.
DocStructure classify_relations(std::vector<Entity> entities,
                                const Grammar& grammar,
                                const RelationConfig& config, PageGeometry page,
                                std::vector<std::string>* warnings = nullptr);

}  // namespace docstruct
