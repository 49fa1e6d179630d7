#include <doctest.h>

#include <algorithm>

#include "docstruct/model.hpp"

using namespace docstruct;

namespace {

Entity ent(std::string id, Category cat, BBox box) {
  Entity e;
  e.id = std::move(id);
  e.category = cat;
  e.bbox = box;
  return e;
}

bool has_rule(const std::vector<Violation>& v, const std::string& rule) {
  return std::any_of(v.begin(), v.end(),
                     [&](const Violation& x) { return x.rule == rule; });
}

}  // namespace

TEST_CASE("category names round trip") {
  for (Category c : all_categories()) {
    const auto parsed = category_from_string(to_string(c));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == c);
  }
  CHECK_FALSE(category_from_string("no_such_category").has_value());
  CHECK(to_string(Category::figure_graphic) == "figure_graphic");
  CHECK(is_meta_category(Category::header));
  CHECK(is_meta_category(Category::page_number));
  CHECK_FALSE(is_meta_category(Category::figure));
}

TEST_CASE("children_in_order follows the sibling chain") {
  DocStructure s;
  s.entities = {
      ent("p", Category::figure, {0, 0, 100, 100}),
      ent("a", Category::figure_graphic, {0, 50, 10, 60}),
      ent("b", Category::figure_caption, {0, 0, 10, 10}),
  };
  s.relations = {
      {"p", "a", RelationType::parent_of},
      {"p", "b", RelationType::parent_of},
      {"a", "b", RelationType::followed_by},
  };
  const auto index = build_index(s);
  // The chain says a then b even though b sits higher on the page.
  CHECK(children_in_order(s, index, "p") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("children without chain membership come last by position") {
  DocStructure s;
  s.entities = {
      ent("p", Category::section, {0, 0, 100, 100}),
      ent("a", Category::content_block, {0, 0, 10, 10}),
      ent("b", Category::content_block, {0, 20, 10, 30}),
      ent("c", Category::content_block, {0, 40, 10, 50}),
  };
  s.relations = {
      {"p", "c", RelationType::parent_of},
      {"p", "a", RelationType::parent_of},
      {"p", "b", RelationType::parent_of},
      {"c", "b", RelationType::followed_by},
  };
  const auto index = build_index(s);
  // c -> b is the chain; a is loose and sorts by position after the chain.
  CHECK(children_in_order(s, index, "p") == std::vector<std::string>{"c", "b", "a"});
}

TEST_CASE("root_ids keeps entity order and skips children") {
  DocStructure s;
  s.entities = {
      ent("x", Category::content_block, {0, 0, 1, 1}),
      ent("y", Category::figure, {0, 2, 1, 3}),
      ent("z", Category::figure_graphic, {0, 2, 1, 3}),
  };
  s.relations = {{"y", "z", RelationType::parent_of}};
  const auto index = build_index(s);
  CHECK(root_ids(s, index) == std::vector<std::string>{"x", "y"});
}

TEST_CASE("validate accepts a well-formed structure") {
  DocStructure s;
  s.entities = {
      ent("f", Category::figure, {0, 0, 20, 20}),
      ent("g", Category::figure_graphic, {0, 0, 10, 10}),
      ent("c", Category::figure_caption, {0, 12, 10, 20}),
      ent("h", Category::header, {0, 0, 5, 2}),
  };
  s.relations = {
      {"f", "g", RelationType::parent_of},
      {"f", "c", RelationType::parent_of},
      {"g", "c", RelationType::followed_by},
  };
  CHECK(validate_structure(s).empty());
}

TEST_CASE("validate flags id problems") {
  DocStructure s;
  s.entities = {ent("a", Category::figure, {0, 0, 1, 1}),
                ent("a", Category::figure, {0, 0, 1, 1})};
  CHECK(has_rule(validate_structure(s), "duplicate_id"));

  DocStructure t;
  t.entities = {ent("a", Category::figure, {0, 0, 1, 1})};
  t.relations = {{"a", "ghost", RelationType::parent_of}};
  CHECK(has_rule(validate_structure(t), "unknown_id"));

  DocStructure u;
  u.entities = {ent("a", Category::figure, {0, 0, 1, 1})};
  u.relations = {{"a", "a", RelationType::followed_by}};
  CHECK(has_rule(validate_structure(u), "self_relation"));
}

TEST_CASE("validate flags meta entities in relations") {
  DocStructure s;
  s.entities = {ent("a", Category::figure, {0, 0, 1, 1}),
                ent("h", Category::header, {0, 0, 1, 1})};
  s.relations = {{"a", "h", RelationType::parent_of}};
  CHECK(has_rule(validate_structure(s), "meta_in_relation"));
}

TEST_CASE("validate flags structural conflicts") {
  DocStructure s;
  s.entities = {ent("a", Category::figure, {0, 0, 9, 9}),
                ent("b", Category::section, {0, 0, 9, 9}),
                ent("c", Category::figure_graphic, {1, 1, 2, 2})};
  s.relations = {{"a", "c", RelationType::parent_of},
                 {"b", "c", RelationType::parent_of}};
  CHECK(has_rule(validate_structure(s), "multiple_parents"));

  DocStructure t;
  t.entities = {ent("a", Category::figure, {0, 0, 9, 9}),
                ent("b", Category::figure_graphic, {1, 1, 2, 2})};
  t.relations = {{"a", "b", RelationType::parent_of},
                 {"a", "b", RelationType::parent_of}};
  CHECK(has_rule(validate_structure(t), "duplicate_relation"));

  DocStructure u;
  u.entities = {ent("a", Category::content_block, {0, 0, 1, 1}),
                ent("b", Category::content_block, {0, 2, 1, 3}),
                ent("c", Category::content_block, {0, 4, 1, 5})};
  u.relations = {{"a", "b", RelationType::followed_by},
                 {"a", "c", RelationType::followed_by}};
  CHECK(has_rule(validate_structure(u), "multiple_successors"));

  u.relations = {{"b", "a", RelationType::followed_by},
                 {"c", "a", RelationType::followed_by}};
  CHECK(has_rule(validate_structure(u), "multiple_predecessors"));
}

TEST_CASE("validate flags cycles") {
  DocStructure s;
  s.entities = {ent("a", Category::figure, {0, 0, 9, 9}),
                ent("b", Category::figure, {1, 1, 8, 8})};
  s.relations = {{"a", "b", RelationType::parent_of},
                 {"b", "a", RelationType::parent_of}};
  CHECK(has_rule(validate_structure(s), "parent_cycle"));

  DocStructure t;
  t.entities = {ent("a", Category::content_block, {0, 0, 1, 1}),
                ent("b", Category::content_block, {0, 2, 1, 3})};
  t.relations = {{"a", "b", RelationType::followed_by},
                 {"b", "a", RelationType::followed_by}};
  CHECK(has_rule(validate_structure(t), "follow_cycle"));
}

TEST_CASE("validate flags follows across different parents") {
  DocStructure s;
  s.entities = {ent("p", Category::figure, {0, 0, 20, 20}),
                ent("q", Category::figure, {30, 0, 50, 20}),
                ent("a", Category::figure_graphic, {1, 1, 2, 2}),
                ent("b", Category::figure_graphic, {31, 1, 32, 2})};
  s.relations = {{"p", "a", RelationType::parent_of},
                 {"q", "b", RelationType::parent_of},
                 {"a", "b", RelationType::followed_by}};
  CHECK(has_rule(validate_structure(s), "cross_parent_follow"));
}
