#include "docstruct/refinement.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace docstruct {

namespace {

// Mutable edge maps for one structure, rebuilt into a relation list after
// the step finishes.
struct EdgeState {
  std::unordered_map<std::string, std::string> parent;
  std::unordered_map<std::string, std::vector<std::string>> children;
  std::unordered_map<std::string, std::string> next, prev;

  static EdgeState from(const DocStructure& s) {
    EdgeState e;
    for (const Relation& r : s.relations) {
      if (r.type == RelationType::parent_of) {
        e.parent.emplace(r.object, r.subject);
        e.children[r.subject].push_back(r.object);
      } else {
        e.next.emplace(r.subject, r.object);
        e.prev.emplace(r.object, r.subject);
      }
    }
    return e;
  }

  void unlink_chain(const std::string& id) {
    auto p = prev.find(id);
    auto n = next.find(id);
    const bool has_p = p != prev.end();
    const bool has_n = n != next.end();
    if (has_p && has_n) {
      const std::string before = p->second;
      const std::string after = n->second;
      next[before] = after;
      prev[after] = before;
    } else if (has_p) {
      next.erase(p->second);
    } else if (has_n) {
      prev.erase(n->second);
    }
    if (has_p) prev.erase(id);
    if (has_n) next.erase(id);
  }

  // `id` keeps its chain position, handed over to `replacement`.
  void substitute_in_chain(const std::string& id, const std::string& replacement) {
    auto p = prev.find(id);
    auto n = next.find(id);
    if (p != prev.end()) {
      next[p->second] = replacement;
      prev[replacement] = p->second;
      prev.erase(id);
    }
    if (n != next.end()) {
      prev[n->second] = replacement;
      next[replacement] = n->second;
      next.erase(id);
    }
  }

  void rebuild_relations(DocStructure& s) const {
    s.relations.clear();
    for (const Entity& e : s.entities) {
      auto it = children.find(e.id);
      if (it == children.end()) continue;
      for (const std::string& c : it->second)
        s.relations.push_back({e.id, c, RelationType::parent_of});
    }
    for (const Entity& e : s.entities) {
      auto it = next.find(e.id);
      if (it != next.end())
        s.relations.push_back({e.id, it->second, RelationType::followed_by});
    }
  }
};

void erase_child(std::vector<std::string>& v, const std::string& id) {
  v.erase(std::remove(v.begin(), v.end(), id), v.end());
}

}  // namespace

std::pair<DocStructure, bool> expand_parents(DocStructure s) {
  StructureIndex index = build_index(s);

  // Depth-first so children settle before their parents.
  std::unordered_map<std::string, int> depth;
  auto depth_of = [&](const std::string& id) {
    int d = 0;
    std::string cur = id;
    while (true) {
      auto it = index.parent.find(cur);
      if (it == index.parent.end()) break;
      cur = it->second;
      ++d;
      if (d > static_cast<int>(s.entities.size())) break;  // defensive, cycles
    }
    return d;
  };
  std::vector<std::string> parents;
  for (const auto& [pid, kids] : index.child_ids)
    if (!kids.empty()) parents.push_back(pid);
  for (const std::string& p : parents) depth[p] = depth_of(p);
  std::sort(parents.begin(), parents.end(),
            [&](const std::string& a, const std::string& b) {
              return std::tie(depth[b], a) < std::tie(depth[a], b);
            });

  bool changed = false;
  for (const std::string& pid : parents) {
    Entity& parent = s.entities[index.by_id.at(pid)];
    BBox grown = parent.bbox;
    for (const std::string& cid : index.child_ids.at(pid))
      grown = union_of(grown, s.entities[index.by_id.at(cid)].bbox);
    if (grown != parent.bbox) {
      parent.bbox = grown;
      changed = true;
    }
  }
  return {std::move(s), changed};
}

std::pair<DocStructure, bool> merge_same_category_singletons(DocStructure s,
                                                             const Grammar& grammar) {
  StructureIndex index = build_index(s);
  EdgeState edges = EdgeState::from(s);
  std::set<std::string> removed;
  bool changed = false;

  for (const Entity& parent_snapshot : s.entities) {
    const std::string pid = parent_snapshot.id;
    if (removed.count(pid)) continue;
    auto kit = edges.children.find(pid);
    if (kit == edges.children.end() || kit->second.empty()) continue;

    Entity& parent = s.entities[index.by_id.at(pid)];
    std::vector<std::string> same_cat;
    for (const std::string& cid : kit->second) {
      if (s.entities[index.by_id.at(cid)].category == parent.category)
        same_cat.push_back(cid);
    }

    std::string victim;
    if (same_cat.size() == 1) {
      victim = same_cat.front();
    } else if (kit->second.size() == 1) {
      const Entity& only = s.entities[index.by_id.at(kit->second.front())];
      if (!grammar.allowed_child(parent.category, only.category))
        victim = only.id;
    }
    if (victim.empty()) continue;

    Entity& child = s.entities[index.by_id.at(victim)];
    parent.bbox = union_of(parent.bbox, child.bbox);

    // Grandchildren move up to the parent.
    auto git = edges.children.find(victim);
    if (git != edges.children.end()) {
      for (const std::string& g : git->second) {
        edges.parent[g] = pid;
        edges.children[pid].push_back(g);
      }
      edges.children.erase(git);
    }
    edges.unlink_chain(victim);
    erase_child(edges.children[pid], victim);
    edges.parent.erase(victim);
    removed.insert(victim);
    changed = true;
  }

  if (changed) {
    std::erase_if(s.entities, [&](const Entity& e) { return removed.count(e.id) > 0; });
    edges.rebuild_relations(s);
  }
  return {std::move(s), changed};
}

std::pair<DocStructure, bool> wrap_conflicting_siblings(DocStructure s,
                                                        const Grammar& grammar) {
  StructureIndex index = build_index(s);
  EdgeState edges = EdgeState::from(s);

  std::unordered_set<std::string> ids;
  for (const Entity& e : s.entities) ids.insert(e.id);
  auto wrapper_id = [&](const std::string& base) {
    // Must sort before the wrapped id so that equal-box tie-breaking makes
    // the wrapper the subject when relations are re-derived.
    std::string id = "!" + base + "_wrap";
    while (ids.count(id) || !(id < base)) id = "!" + id;
    ids.insert(id);
    return id;
  };

  bool changed = false;
  std::vector<Entity> additions;
  for (const Entity& parent : s.entities) {
    auto kit = edges.children.find(parent.id);
    if (kit == edges.children.end()) continue;

    std::map<Category, int> counts;
    for (const std::string& cid : kit->second)
      ++counts[s.entities[index.by_id.at(cid)].category];

    for (const auto& [cat, count] : counts) {
      const int cap = grammar.max_count(parent.category, cat);
      if (cap < 0 || count <= cap) continue;
      std::vector<std::string> targets;
      for (const std::string& cid : kit->second)
        if (s.entities[index.by_id.at(cid)].category == cat) targets.push_back(cid);
      for (const std::string& cid : targets) {
        const Entity& child = s.entities[index.by_id.at(cid)];
        Entity wrapper;
        wrapper.id = wrapper_id(cid);
        wrapper.category = parent.category;
        wrapper.bbox = child.bbox;
        wrapper.confidence = child.confidence;

        auto& kids = edges.children[parent.id];
        std::replace(kids.begin(), kids.end(), cid, wrapper.id);
        edges.parent[wrapper.id] = parent.id;
        edges.parent[cid] = wrapper.id;
        edges.children[wrapper.id] = {cid};
        edges.substitute_in_chain(cid, wrapper.id);

        additions.push_back(std::move(wrapper));
        changed = true;
      }
    }
  }

  if (changed) {
    for (Entity& w : additions) s.entities.push_back(std::move(w));
    edges.rebuild_relations(s);
  }
  return {std::move(s), changed};
}

bool is_child_only_category(Category c) {
  switch (c) {
    case Category::figure_graphic:
    case Category::figure_caption:
    case Category::table_caption:
    case Category::tabular:
    case Category::item:
    case Category::table_cell:
    case Category::table_row:
    case Category::table_column:
    case Category::equation_formula:
    case Category::equation_label:
    case Category::bibliography_block:
      return true;
    default:
      return false;
  }
}

std::pair<DocStructure, bool> adopt_orphans(DocStructure s, const Grammar& grammar) {
  StructureIndex index = build_index(s);
  EdgeState edges = EdgeState::from(s);
  bool changed = false;

  for (const Entity& snapshot : s.entities) {
    const std::string id = snapshot.id;
    if (!is_child_only_category(snapshot.category)) continue;
    if (edges.parent.count(id)) continue;

    std::vector<std::string> neighbors;
    if (auto it = edges.prev.find(id); it != edges.prev.end())
      neighbors.push_back(it->second);
    if (auto it = edges.next.find(id); it != edges.next.end())
      neighbors.push_back(it->second);

    const Entity& orphan = s.entities[index.by_id.at(id)];
    std::vector<std::string> survivors;
    for (const std::string& nid : neighbors) {
      const Entity& cand = s.entities[index.by_id.at(nid)];
      if (!grammar.allowed_child(cand.category, orphan.category)) continue;
      if (!intersection(cand.bbox, orphan.bbox)) continue;
      survivors.push_back(nid);
    }
    if (survivors.size() != 1) continue;

    const std::string& pid = survivors.front();
    Entity& parent = s.entities[index.by_id.at(pid)];
    parent.bbox = union_of(parent.bbox, orphan.bbox);
    edges.unlink_chain(id);
    edges.parent[id] = pid;
    edges.children[pid].push_back(id);
    changed = true;
  }

  if (changed) edges.rebuild_relations(s);
  return {std::move(s), changed};
}

DocStructure refine(std::vector<Entity> entities, const Grammar& grammar,
                    const RelationConfig& config, PageGeometry page,
                    const RefinementConfig& refinement,
                    std::vector<std::string>* warnings) {
  bool converged = false;
  for (int iter = 0; iter < refinement.max_iterations && !converged; ++iter) {
    DocStructure s = classify_relations(std::move(entities), grammar, config, page, warnings);

    bool changed;
    std::tie(s, changed) = expand_parents(std::move(s));
    if (!changed) std::tie(s, changed) = merge_same_category_singletons(std::move(s), grammar);
    if (!changed) std::tie(s, changed) = wrap_conflicting_siblings(std::move(s), grammar);
    if (!changed) std::tie(s, changed) = adopt_orphans(std::move(s), grammar);

    entities = std::move(s.entities);
    converged = !changed;
  }
  if (!converged && warnings)
    warnings->push_back("refine: iteration budget exhausted before a stable pass");
  return classify_relations(std::move(entities), grammar, config, page, warnings);
}

}  // namespace docstruct
