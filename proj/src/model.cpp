#include "docstruct/model.hpp"

#include <algorithm>
#include <set>

namespace docstruct {

std::string_view to_string(RelationType t) {
  switch (t) {
    case RelationType::parent_of: return "parent_of";
    case RelationType::followed_by: return "followed_by";
  }
  return "";
}

std::optional<RelationType> relation_type_from_string(std::string_view name) {
  if (name == "parent_of") return RelationType::parent_of;
  if (name == "followed_by") return RelationType::followed_by;
  return std::nullopt;
}

const Entity* DocStructure::find(const std::string& id) const {
  for (const Entity& e : entities)
    if (e.id == id) return &e;
  return nullptr;
}

Entity* DocStructure::find(const std::string& id) {
  for (Entity& e : entities)
    if (e.id == id) return &e;
  return nullptr;
}

StructureIndex build_index(const DocStructure& s) {
  StructureIndex idx;
  idx.by_id.reserve(s.entities.size());
  for (size_t i = 0; i < s.entities.size(); ++i)
    idx.by_id.emplace(s.entities[i].id, i);
  for (const Relation& r : s.relations) {
    if (r.type == RelationType::parent_of) {
      idx.parent.emplace(r.object, r.subject);
      idx.child_ids[r.subject].push_back(r.object);
    } else {
      idx.next_sibling.emplace(r.subject, r.object);
      idx.prev_sibling.emplace(r.object, r.subject);
    }
  }
  return idx;
}

std::vector<std::string> children_in_order(const DocStructure& s,
                                           const StructureIndex& index,
                                           const std::string& id) {
  auto it = index.child_ids.find(id);
  if (it == index.child_ids.end()) return {};
  const std::vector<std::string>& kids = it->second;
  std::set<std::string> in_group(kids.begin(), kids.end());

  // Heads: chain members whose predecessor is outside the group.
  std::vector<std::string> heads;
  std::set<std::string> chained;
  for (const std::string& k : kids) {
    auto nx = index.next_sibling.find(k);
    auto pv = index.prev_sibling.find(k);
    const bool next_in = nx != index.next_sibling.end() && in_group.count(nx->second);
    const bool prev_in = pv != index.prev_sibling.end() && in_group.count(pv->second);
    if (next_in || prev_in) chained.insert(k);
    if ((next_in || prev_in) && !prev_in) heads.push_back(k);
  }

  auto pos_key = [&](const std::string& a) {
    const Entity& e = s.entities[index.by_id.at(a)];
    return std::tuple<double, double, const std::string&>(e.bbox.y0, e.bbox.x0, a);
  };
  std::sort(heads.begin(), heads.end(),
            [&](const std::string& a, const std::string& b) { return pos_key(a) < pos_key(b); });

  std::vector<std::string> out;
  std::set<std::string> emitted;
  for (const std::string& h : heads) {
    std::string cur = h;
    while (in_group.count(cur) && !emitted.count(cur)) {
      out.push_back(cur);
      emitted.insert(cur);
      auto nx = index.next_sibling.find(cur);
      if (nx == index.next_sibling.end()) break;
      cur = nx->second;
    }
  }
  std::vector<std::string> loose;
  for (const std::string& k : kids)
    if (!emitted.count(k)) loose.push_back(k);
  std::sort(loose.begin(), loose.end(),
            [&](const std::string& a, const std::string& b) { return pos_key(a) < pos_key(b); });
  out.insert(out.end(), loose.begin(), loose.end());
  return out;
}

std::vector<std::string> root_ids(const DocStructure& s, const StructureIndex& index) {
  std::vector<std::string> roots;
  for (const Entity& e : s.entities)
    if (!index.has_parent(e.id)) roots.push_back(e.id);
  return roots;
}

std::vector<Violation> validate_structure(const DocStructure& s) {
  std::vector<Violation> out;
  std::unordered_map<std::string, size_t> by_id;
  for (size_t i = 0; i < s.entities.size(); ++i) {
    const std::string& id = s.entities[i].id;
    if (by_id.count(id))
      out.push_back({"duplicate_id", id, "", "entity id appears more than once"});
    else
      by_id.emplace(id, i);
  }

  auto resolves = [&](const std::string& id) { return by_id.count(id) > 0; };

  std::unordered_map<std::string, std::string> parent;
  std::unordered_map<std::string, std::string> next, prev;
  for (const Relation& r : s.relations) {
    if (!resolves(r.subject) || !resolves(r.object)) {
      out.push_back({"unknown_id", r.subject, r.object, "relation endpoint not in entity list"});
      continue;
    }
    if (r.subject == r.object) {
      out.push_back({"self_relation", r.subject, r.object, ""});
      continue;
    }
    const Category sc = s.entities[by_id[r.subject]].category;
    const Category oc = s.entities[by_id[r.object]].category;
    if (is_meta_category(sc) || is_meta_category(oc))
      out.push_back({"meta_in_relation", r.subject, r.object,
                     "meta entities carry no relations"});
    if (r.type == RelationType::parent_of) {
      auto [it, inserted] = parent.emplace(r.object, r.subject);
      if (!inserted && it->second != r.subject)
        out.push_back({"multiple_parents", r.object, "", "entity has more than one parent"});
      else if (!inserted)
        out.push_back({"duplicate_relation", r.subject, r.object, "parent_of repeated"});
    } else {
      if (!next.emplace(r.subject, r.object).second)
        out.push_back({"multiple_successors", r.subject, "", "entity followed by more than one"});
      if (!prev.emplace(r.object, r.subject).second)
        out.push_back({"multiple_predecessors", r.object, "", "entity follows more than one"});
    }
  }

  // Parent cycles.
  for (const auto& [child, _] : parent) {
    std::string cur = child;
    size_t steps = 0;
    while (parent.count(cur) && steps <= parent.size()) {
      cur = parent.at(cur);
      ++steps;
      if (cur == child) {
        out.push_back({"parent_cycle", child, "", "nesting contains a cycle"});
        break;
      }
    }
  }

  // followed_by must stay within one sibling group.
  auto parent_or_root = [&](const std::string& id) -> std::string {
    auto it = parent.find(id);
    return it == parent.end() ? std::string() : it->second;
  };
  for (const Relation& r : s.relations) {
    if (r.type != RelationType::followed_by) continue;
    if (!resolves(r.subject) || !resolves(r.object) || r.subject == r.object) continue;
    if (parent_or_root(r.subject) != parent_or_root(r.object))
      out.push_back({"cross_parent_follow", r.subject, r.object,
                     "followed_by links entities with different parents"});
  }

  // followed_by cycles (a chain must be a path).
  {
    std::set<std::string> seen;
    for (const auto& [start, _] : next) {
      if (seen.count(start)) continue;
      std::string cur = start;
      std::set<std::string> on_path;
      while (next.count(cur)) {
        if (on_path.count(cur)) {
          out.push_back({"follow_cycle", cur, "", "followed_by chain loops"});
          break;
        }
        on_path.insert(cur);
        cur = next.at(cur);
      }
      seen.insert(on_path.begin(), on_path.end());
    }
  }

  return out;
}

}  // namespace docstruct
