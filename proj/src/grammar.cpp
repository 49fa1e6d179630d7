#include "docstruct/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace docstruct {

namespace {

// Keep in sync with data/grammar.json (a unit test compares the two).
const char* kDefaultConfig = R"({
  "meta": ["header", "footer", "page_number", "date", "keywords"],
  "floats": ["figure", "table"],
  "rules": [
    {"parent": "abstract", "children": ["heading"],
     "inferred_children": ["content_line", "content_block"]},
    {"parent": "figure",
     "children": ["figure", "figure_graphic", "figure_caption"],
     "max_counts": {"figure_graphic": 1}},
    {"parent": "item", "children": ["equation"]},
    {"parent": "itemize", "children": ["item"]},
    {"parent": "table", "children": ["tabular", "table_caption"]},
    {"parent": "tabular",
     "children": ["table_cell", "table_row", "table_column"]},
    {"parent": "content_block",
     "inferred_children": ["content_line", "equation"]},
    {"parent": "bibliography", "inferred_children": ["bibliography_block"]},
    {"parent": "bibliography_block", "inferred_children": ["content_line"]},
    {"parent": "heading", "inferred_children": ["content_line"]},
    {"parent": "equation",
     "inferred_children": ["equation_formula", "equation_label"]},
    {"parent": "section", "any_non_meta_children": true}
  ],
  "ordering_preferences": [
    {"parent": "figure", "first": "figure_graphic", "then": "figure_caption"}
  ]
})";

Category parse_category(const nlohmann::json& j, const char* where) {
  const auto name = j.get<std::string>();
  const auto cat = category_from_string(name);
  if (!cat)
    throw std::invalid_argument(std::string("grammar config: unknown category '") +
                                name + "' in " + where);
  return *cat;
}

}  // namespace

const std::string& Grammar::default_config_text() {
  static const std::string text = kDefaultConfig;
  return text;
}

const Grammar& Grammar::default_grammar() {
  static const Grammar g = Grammar::from_json_text(default_config_text());
  return g;
}

Grammar Grammar::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("grammar config: ") + e.what());
  }

  Grammar g;
  for (const auto& m : j.value("meta", nlohmann::json::array()))
    g.meta_.set(static_cast<int>(parse_category(m, "meta")));
  for (const auto& f : j.value("floats", nlohmann::json::array()))
    g.floats_.set(static_cast<int>(parse_category(f, "floats")));

  for (const auto& rule : j.value("rules", nlohmann::json::array())) {
    const Category parent = parse_category(rule.at("parent"), "rules");
    const int p = static_cast<int>(parent);
    for (const auto& c : rule.value("children", nlohmann::json::array()))
      g.allowed_[p].set(static_cast<int>(parse_category(c, "children")));
    for (const auto& c : rule.value("inferred_children", nlohmann::json::array()))
      g.allowed_[p].set(static_cast<int>(parse_category(c, "inferred_children")));
    if (rule.value("any_non_meta_children", false)) {
      for (Category c : all_categories())
        if (!g.meta_.test(static_cast<int>(c)))
          g.allowed_[p].set(static_cast<int>(c));
    }
    if (rule.contains("max_counts")) {
      for (const auto& [name, cap] : rule.at("max_counts").items()) {
        const auto child = category_from_string(name);
        if (!child)
          throw std::invalid_argument("grammar config: unknown category '" +
                                      name + "' in max_counts");
        g.max_counts_[{p, static_cast<int>(*child)}] = cap.get<int>();
      }
    }
  }

  for (const auto& pref : j.value("ordering_preferences", nlohmann::json::array())) {
    g.ordering_.push_back({parse_category(pref.at("parent"), "ordering_preferences"),
                           parse_category(pref.at("first"), "ordering_preferences"),
                           parse_category(pref.at("then"), "ordering_preferences")});
  }
  return g;
}

Grammar Grammar::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("grammar config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

bool Grammar::allowed_child(Category parent, Category child) const {
  return allowed_[static_cast<int>(parent)].test(static_cast<int>(child));
}

bool Grammar::is_meta(Category c) const { return meta_.test(static_cast<int>(c)); }

bool Grammar::is_float(Category c) const { return floats_.test(static_cast<int>(c)); }

int Grammar::max_count(Category parent, Category child) const {
  auto it = max_counts_.find({static_cast<int>(parent), static_cast<int>(child)});
  return it == max_counts_.end() ? -1 : it->second;
}

std::vector<Violation> check_conformance(const DocStructure& s, const Grammar& g) {
  std::vector<Violation> out;
  std::unordered_map<std::string, const Entity*> by_id;
  for (const Entity& e : s.entities) by_id.emplace(e.id, &e);

  std::map<std::pair<std::string, int>, int> child_counts;
  for (const Relation& r : s.relations) {
    if (r.type != RelationType::parent_of) continue;
    auto si = by_id.find(r.subject);
    auto oi = by_id.find(r.object);
    if (si == by_id.end() || oi == by_id.end()) continue;
    const Category pc = si->second->category;
    const Category cc = oi->second->category;
    if (!g.allowed_child(pc, cc)) {
      out.push_back({"illegal_child", r.subject, r.object,
                     std::string(to_string(pc)) + " may not nest " +
                         std::string(to_string(cc))});
    }
    ++child_counts[{r.subject, static_cast<int>(cc)}];
  }

  for (const auto& [key, count] : child_counts) {
    const auto& [parent_id, cc] = key;
    auto pi = by_id.find(parent_id);
    if (pi == by_id.end()) continue;
    const int cap = g.max_count(pi->second->category, static_cast<Category>(cc));
    if (cap >= 0 && count > cap) {
      out.push_back({"max_count_exceeded", parent_id, "",
                     std::to_string(count) + " children of category " +
                         std::string(to_string(static_cast<Category>(cc))) +
                         ", at most " + std::to_string(cap) + " allowed"});
    }
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.subject, a.rule, a.object) < std::tie(b.subject, b.rule, b.object);
  });
  return out;
}

}  // namespace docstruct
