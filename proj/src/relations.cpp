#include "docstruct/relations.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace docstruct {

namespace {

using EntityMap = std::unordered_map<std::string, const Entity*>;

EntityMap map_by_id(std::span<const Entity> entities) {
  EntityMap m;
  m.reserve(entities.size());
  for (const Entity& e : entities) m.emplace(e.id, &e);
  return m;
}

bool position_less(const Entity& a, const Entity& b) {
  return std::tie(a.bbox.y0, a.bbox.x0, a.id) < std::tie(b.bbox.y0, b.bbox.x0, b.id);
}

}  // namespace

std::vector<CandidatePair> nesting_candidates(std::span<const Entity> entities,
                                              const NestingThresholds& thresholds,
                                              std::vector<std::string>* warnings) {
  std::vector<CandidatePair> out;
  for (const Entity& subj : entities) {
    const double subj_area = area(subj.bbox);
    for (const Entity& obj : entities) {
      if (&subj == &obj) continue;
      if (is_degenerate(obj.bbox)) {
        if (warnings)
          warnings->push_back("nesting_candidates: skipped pair (" + subj.id + ", " +
                              obj.id + "): object box has zero area");
        continue;
      }
      bool candidate = contains(subj.bbox, obj.bbox);
      if (!candidate) {
        const double obj_area = area(obj.bbox);
        candidate = overlap_fraction(subj.bbox, obj.bbox) >= thresholds.min_overlap &&
                    subj_area / obj_area > thresholds.min_area_ratio;
      }
      if (candidate) out.push_back({subj.id, obj.id});
    }
  }

  // Equal boxes contain each other; keep one direction only.
  std::set<std::pair<std::string, std::string>> seen;
  for (const CandidatePair& p : out) seen.insert({p.subject, p.object});
  EntityMap by_id = map_by_id(entities);
  std::vector<CandidatePair> kept;
  kept.reserve(out.size());
  for (const CandidatePair& p : out) {
    if (seen.count({p.object, p.subject})) {
      const double sa = area(by_id.at(p.subject)->bbox);
      const double oa = area(by_id.at(p.object)->bbox);
      if (sa < oa) continue;
      if (sa == oa && p.subject > p.object) continue;
    }
    kept.push_back(p);
  }
  return kept;
}

std::vector<CandidatePair> grammar_filter(std::vector<CandidatePair> candidates,
                                          std::span<const Entity> entities,
                                          const Grammar& grammar) {
  EntityMap by_id = map_by_id(entities);
  std::erase_if(candidates, [&](const CandidatePair& p) {
    const Entity* s = by_id.at(p.subject);
    const Entity* o = by_id.at(p.object);
    return !grammar.allowed_child(s->category, o->category);
  });
  return candidates;
}

std::vector<CandidatePair> prune_to_direct_children(std::vector<CandidatePair> candidates) {
  // Index node ids.
  std::unordered_map<std::string, int> node_of;
  std::vector<const std::string*> names;
  auto intern = [&](const std::string& id) {
    auto [it, inserted] = node_of.emplace(id, static_cast<int>(names.size()));
    if (inserted) names.push_back(&it->first);
    return it->second;
  };
  const int m = static_cast<int>(candidates.size());
  std::vector<std::pair<int, int>> edges(m);
  for (int i = 0; i < m; ++i)
    edges[i] = {intern(candidates[i].subject), intern(candidates[i].object)};

  const int n = static_cast<int>(names.size());
  std::vector<std::vector<int>> succ(n);
  for (auto [u, v] : edges) succ[u].push_back(v);

  // reach[u][v]: v reachable from u via one or more edges.
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (int u = 0; u < n; ++u) {
    std::vector<int> stack(succ[u]);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (reach[u][v]) continue;
      reach[u][v] = 1;
      for (int w : succ[v]) stack.push_back(w);
    }
  }

  std::vector<CandidatePair> kept;
  kept.reserve(candidates.size());
  for (int i = 0; i < m; ++i) {
    auto [u, v] = edges[i];
    bool redundant = false;
    for (int w : succ[u]) {
      if (w != v && reach[w][v]) {
        redundant = true;
        break;
      }
    }
    if (!redundant) kept.push_back(std::move(candidates[i]));
  }
  return kept;
}

std::vector<CandidatePair> resolve_unique_parents(std::vector<CandidatePair> candidates,
                                                  std::span<const Entity> entities) {
  EntityMap by_id = map_by_id(entities);
  // Best subject per object under (IoU, confidence, area, smaller id).
  std::unordered_map<std::string, const CandidatePair*> best;
  for (const CandidatePair& p : candidates) {
    auto it = best.find(p.object);
    if (it == best.end()) {
      best.emplace(p.object, &p);
      continue;
    }
    const Entity* obj = by_id.at(p.object);
    const Entity* cur = by_id.at(it->second->subject);
    const Entity* cand = by_id.at(p.subject);
    const auto key = [&](const Entity* s) {
      return std::tuple<double, double, double>(
          iou(s->bbox, obj->bbox), s->confidence.value_or(-1.0), area(s->bbox));
    };
    const auto ck = key(cand);
    const auto bk = key(cur);
    if (ck > bk || (ck == bk && cand->id < cur->id)) it->second = &p;
  }
  std::vector<CandidatePair> kept;
  kept.reserve(best.size());
  for (const CandidatePair& p : candidates)
    if (best.at(p.object) == &p) kept.push_back(p);
  return kept;
}

LayoutGroup layout_group_of(const BBox& b, double page_width, double tau_overlap) {
  const double w = b.width();
  if (w <= 0.0) return LayoutGroup::center;
  const double half = page_width / 2.0;
  const double left = std::max(0.0, std::min(b.x1, half) - std::max(b.x0, 0.0));
  const double right = std::max(0.0, std::min(b.x1, page_width) - std::max(b.x0, half));
  if (left / w > tau_overlap) return LayoutGroup::left;
  if (right / w > tau_overlap) return LayoutGroup::right;
  return LayoutGroup::center;
}

LayoutGroups assign_layout_groups(std::span<const Entity> entities,
                                  double page_width, double tau_overlap) {
  LayoutGroups g;
  for (const Entity& e : entities) {
    switch (layout_group_of(e.bbox, page_width, tau_overlap)) {
      case LayoutGroup::left: g.left.push_back(e.id); break;
      case LayoutGroup::center: g.center.push_back(e.id); break;
      case LayoutGroup::right: g.right.push_back(e.id); break;
    }
  }
  return g;
}

std::vector<std::string> reading_order(std::span<const Entity> entities) {
  std::vector<const Entity*> ptrs;
  ptrs.reserve(entities.size());
  for (const Entity& e : entities) ptrs.push_back(&e);
  std::sort(ptrs.begin(), ptrs.end(),
            [](const Entity* a, const Entity* b) { return position_less(*a, *b); });
  std::vector<std::string> out;
  out.reserve(ptrs.size());
  for (const Entity* e : ptrs) out.push_back(e->id);
  return out;
}

namespace {

// Ensures every `first`-category entity precedes every `then`-category one,
// keeping all other positions fixed.
void apply_ordering_preferences(std::vector<const Entity*>& ordered,
                                Category parent_category, const Grammar& grammar) {
  for (const auto& pref : grammar.ordering_preferences()) {
    if (pref.parent != parent_category) continue;
    std::vector<size_t> slots;
    std::vector<const Entity*> firsts, thens;
    for (size_t i = 0; i < ordered.size(); ++i) {
      if (ordered[i]->category == pref.first) {
        slots.push_back(i);
        firsts.push_back(ordered[i]);
      } else if (ordered[i]->category == pref.then) {
        slots.push_back(i);
        thens.push_back(ordered[i]);
      }
    }
    size_t k = 0;
    for (const Entity* e : firsts) ordered[slots[k++]] = e;
    for (const Entity* e : thens) ordered[slots[k++]] = e;
  }
}

}  // namespace

std::vector<std::string> ordered_group(std::span<const Entity> group,
                                       PageGeometry page, double tau_overlap,
                                       bool bypass_column_layout,
                                       std::optional<Category> parent_category,
                                       const Grammar* grammar) {
  std::vector<const Entity*> ordered;

  auto sorted_ptrs = [](std::vector<const Entity*> v) {
    std::sort(v.begin(), v.end(),
              [](const Entity* a, const Entity* b) { return position_less(*a, *b); });
    return v;
  };

  if (bypass_column_layout) {
    std::vector<const Entity*> all;
    for (const Entity& e : group) all.push_back(&e);
    ordered = sorted_ptrs(std::move(all));
  } else {
    std::vector<const Entity*> left, center, right;
    for (const Entity& e : group) {
      switch (layout_group_of(e.bbox, page.width, tau_overlap)) {
        case LayoutGroup::left: left.push_back(&e); break;
        case LayoutGroup::center: center.push_back(&e); break;
        case LayoutGroup::right: right.push_back(&e); break;
      }
    }
    if (center.empty()) {
      for (const Entity* e : sorted_ptrs(std::move(left))) ordered.push_back(e);
      for (const Entity* e : sorted_ptrs(std::move(right))) ordered.push_back(e);
    } else {
      // Center entities cut the page into vertical bands: band 2i sits above
      // center i, band 2i+1 is center i itself. Other entities join the band
      // containing their vertical midpoint.
      center = sorted_ptrs(std::move(center));
      const int k = static_cast<int>(center.size());
      auto band_of = [&](const Entity* e) {
        const double ym = (e->bbox.y0 + e->bbox.y1) / 2.0;
        for (int i = 0; i < k; ++i) {
          if (ym < center[i]->bbox.y0) return 2 * i;
          if (ym <= center[i]->bbox.y1) return 2 * i + 1;
        }
        return 2 * k;
      };
      std::map<int, std::vector<const Entity*>> band_left, band_right;
      for (const Entity* e : left) band_left[band_of(e)].push_back(e);
      for (const Entity* e : right) band_right[band_of(e)].push_back(e);
      for (int band = 0; band <= 2 * k; ++band) {
        if (auto it = band_left.find(band); it != band_left.end())
          for (const Entity* e : sorted_ptrs(std::move(it->second))) ordered.push_back(e);
        if (band % 2 == 1) ordered.push_back(center[band / 2]);
        if (auto it = band_right.find(band); it != band_right.end())
          for (const Entity* e : sorted_ptrs(std::move(it->second))) ordered.push_back(e);
      }
    }
  }

  if (parent_category && grammar)
    apply_ordering_preferences(ordered, *parent_category, *grammar);

  std::vector<std::string> out;
  out.reserve(ordered.size());
  for (const Entity* e : ordered) out.push_back(e->id);
  return out;
}

std::vector<Relation> order_entities(const DocStructure& nested, const Grammar& grammar,
                                     PageGeometry page, double tau_overlap) {
  StructureIndex index = build_index(nested);

  auto emit_chain = [](const std::vector<std::string>& order,
                       std::vector<Relation>& out) {
    for (size_t i = 0; i + 1 < order.size(); ++i)
      out.push_back({order[i], order[i + 1], RelationType::followed_by});
  };

  std::vector<Relation> out;

  std::vector<Entity> roots;
  for (const Entity& e : nested.entities)
    if (!index.has_parent(e.id) && !grammar.is_meta(e.category)) roots.push_back(e);
  emit_chain(ordered_group(roots, page, tau_overlap, false, std::nullopt, &grammar), out);

  for (const Entity& parent : nested.entities) {
    auto it = index.child_ids.find(parent.id);
    if (it == index.child_ids.end() || it->second.size() < 2) continue;
    std::vector<Entity> kids;
    for (const std::string& cid : it->second)
      kids.push_back(nested.entities[index.by_id.at(cid)]);
    const bool bypass = grammar.is_float(parent.category);
    emit_chain(ordered_group(kids, page, tau_overlap, bypass, parent.category, &grammar),
               out);
  }
  return out;
}

DocStructure classify_relations(std::vector<Entity> entities, const Grammar& grammar,
                                const RelationConfig& config, PageGeometry page,
                                std::vector<std::string>* warnings) {
  DocStructure s;
  s.page_width = page.width;
  s.page_height = page.height;
  s.entities = std::move(entities);

  std::vector<Entity> scoped;
  scoped.reserve(s.entities.size());
  for (const Entity& e : s.entities)
    if (!grammar.is_meta(e.category)) scoped.push_back(e);

  auto candidates = nesting_candidates(scoped, config.nesting, warnings);
  candidates = grammar_filter(std::move(candidates), scoped, grammar);
  candidates = prune_to_direct_children(std::move(candidates));
  candidates = resolve_unique_parents(std::move(candidates), scoped);

  s.relations.reserve(candidates.size() * 2);
  for (const CandidatePair& p : candidates)
    s.relations.push_back({p.subject, p.object, RelationType::parent_of});

  auto chains = order_entities(s, grammar, page, config.tau_overlap);
  s.relations.insert(s.relations.end(), chains.begin(), chains.end());
  return s;
}

}  // namespace docstruct
