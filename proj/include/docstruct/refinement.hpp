#pragma once

#include <span>
#include <utility>

#include "docstruct/grammar.hpp"
#include "docstruct/model.hpp"
#include "docstruct/relations.hpp"

namespace docstruct {

struct RefinementConfig {
  int max_iterations = 30;
};

// Steps of one refinement pass. Each returns the adjusted structure plus
// whether anything changed. They keep the structure well-formed but leave
// re-deriving the relations to the caller.

// Parents grow to enclose their children (children are updated before
// their own parents, so one pass settles whole chains).
std::pair<DocStructure, bool> expand_parents(DocStructure s);

// A parent with exactly one child of its own category absorbs that child
// (duplicate detections); likewise a parent whose only child it may not
// nest under the grammar.
std::pair<DocStructure, bool> merge_same_category_singletons(DocStructure s,
                                                             const Grammar& grammar);

// Where a parent holds more same-category children than the grammar caps
// (several figure graphics under one figure), every such child is wrapped
// in a fresh entity of the parent's category covering just that child.
std::pair<DocStructure, bool> wrap_conflicting_siblings(DocStructure s,
                                                        const Grammar& grammar);

// Parentless entities of categories that only ever occur nested (captions,
// graphics, tabulars, cells, ...) are attached to a reading-order neighbor
// when exactly one neighbor is grammar-compatible and overlaps them.
std::pair<DocStructure, bool> adopt_orphans(DocStructure s, const Grammar& grammar);

bool is_child_only_category(Category c);

// Classify, then loop: first step that changes anything restarts the loop
// with freshly derived relations; exit on a pass with no changes or when
// the iteration budget runs out, then classify once more.
DocStructure refine(std::vector<Entity> entities, const Grammar& grammar,
                    const RelationConfig& config, PageGeometry page,
                    const RefinementConfig& refinement = {},
                    std::vector<std::string>* warnings = nullptr);

}  // namespace docstruct
