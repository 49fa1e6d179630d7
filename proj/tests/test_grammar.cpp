#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "docstruct/grammar.hpp"

using namespace docstruct;

TEST_CASE("default grammar core rules") {
  const Grammar& g = Grammar::default_grammar();

  CHECK(g.allowed_child(Category::figure, Category::figure_graphic));
  CHECK(g.allowed_child(Category::figure, Category::figure_caption));
  CHECK(g.allowed_child(Category::figure, Category::figure));  // subfigures
  CHECK(g.allowed_child(Category::table, Category::tabular));
  CHECK(g.allowed_child(Category::table, Category::table_caption));
  CHECK(g.allowed_child(Category::tabular, Category::table_row));
  CHECK(g.allowed_child(Category::tabular, Category::table_column));
  CHECK(g.allowed_child(Category::tabular, Category::table_cell));
  CHECK(g.allowed_child(Category::itemize, Category::item));
  CHECK(g.allowed_child(Category::item, Category::equation));

  CHECK_FALSE(g.allowed_child(Category::figure, Category::table));
  CHECK_FALSE(g.allowed_child(Category::figure_graphic, Category::figure));
  CHECK_FALSE(g.allowed_child(Category::table_row, Category::table_cell));
  CHECK_FALSE(g.allowed_child(Category::table_column, Category::table_cell));
  CHECK_FALSE(g.allowed_child(Category::table, Category::table_cell));
}

TEST_CASE("default grammar text hierarchy rules") {
  const Grammar& g = Grammar::default_grammar();

  CHECK(g.allowed_child(Category::content_block, Category::content_line));
  CHECK(g.allowed_child(Category::content_block, Category::equation));
  CHECK(g.allowed_child(Category::bibliography, Category::bibliography_block));
  CHECK(g.allowed_child(Category::bibliography_block, Category::content_line));
  CHECK(g.allowed_child(Category::heading, Category::content_line));
  CHECK(g.allowed_child(Category::equation, Category::equation_formula));
  CHECK(g.allowed_child(Category::equation, Category::equation_label));
  CHECK(g.allowed_child(Category::abstract, Category::heading));
  CHECK(g.allowed_child(Category::abstract, Category::content_block));

  // Sections hold anything that is not meta.
  CHECK(g.allowed_child(Category::section, Category::content_block));
  CHECK(g.allowed_child(Category::section, Category::figure));
  CHECK(g.allowed_child(Category::section, Category::equation));
  CHECK_FALSE(g.allowed_child(Category::section, Category::header));
  CHECK_FALSE(g.allowed_child(Category::section, Category::page_number));

  CHECK_FALSE(g.allowed_child(Category::content_block, Category::table));
}

TEST_CASE("meta and float sets") {
  const Grammar& g = Grammar::default_grammar();
  for (Category c : {Category::header, Category::footer, Category::page_number,
                     Category::date, Category::keywords})
    CHECK(g.is_meta(c));
  CHECK_FALSE(g.is_meta(Category::figure));
  CHECK(g.is_float(Category::figure));
  CHECK(g.is_float(Category::table));
  CHECK_FALSE(g.is_float(Category::tabular));
  CHECK_FALSE(g.is_float(Category::content_block));
}

TEST_CASE("child count caps") {
  const Grammar& g = Grammar::default_grammar();
  CHECK(g.max_count(Category::figure, Category::figure_graphic) == 1);
  CHECK(g.max_count(Category::figure, Category::figure_caption) == -1);
  CHECK(g.max_count(Category::tabular, Category::table_cell) == -1);
}

TEST_CASE("ordering preferences include graphic before caption") {
  const Grammar& g = Grammar::default_grammar();
  bool found = false;
  for (const auto& pref : g.ordering_preferences())
    if (pref.parent == Category::figure && pref.first == Category::figure_graphic &&
        pref.then == Category::figure_caption)
      found = true;
  CHECK(found);
}

TEST_CASE("bundled config file matches the builtin grammar") {
  std::ifstream in(DOCSTRUCT_DATA_DIR "/grammar.json");
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto from_file = nlohmann::json::parse(buf.str());
  const auto builtin = nlohmann::json::parse(Grammar::default_config_text());
  CHECK(from_file == builtin);
}

TEST_CASE("custom config text overrides the rules") {
  const std::string text = R"({
    "meta": ["header"],
    "floats": ["figure"],
    "rules": [{"parent": "figure", "children": ["figure_caption"]}]
  })";
  const Grammar g = Grammar::from_json_text(text);
  CHECK(g.allowed_child(Category::figure, Category::figure_caption));
  CHECK_FALSE(g.allowed_child(Category::figure, Category::figure_graphic));
  CHECK(g.is_meta(Category::header));
  CHECK_FALSE(g.is_meta(Category::footer));
}

TEST_CASE("malformed config is rejected") {
  CHECK_THROWS(Grammar::from_json_text("not json"));
  CHECK_THROWS(Grammar::from_json_text(R"({"rules": [{"parent": "nope"}]})"));
}

TEST_CASE("conformance reports illegal nesting") {
  DocStructure s;
  Entity f;
  f.id = "f";
  f.category = Category::figure;
  f.bbox = {0, 0, 10, 10};
  Entity t = f;
  t.id = "t";
  t.category = Category::table;
  t.bbox = {1, 1, 9, 9};
  s.entities = {f, t};
  s.relations = {{"f", "t", RelationType::parent_of}};
  const auto violations = check_conformance(s, Grammar::default_grammar());
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].rule == "illegal_child");
  CHECK(violations[0].subject == "f");
  CHECK(violations[0].object == "t");
}

TEST_CASE("conformance reports cap violations") {
  DocStructure s;
  auto make = [](std::string id, Category c, BBox b) {
    Entity e;
    e.id = std::move(id);
    e.category = c;
    e.bbox = b;
    return e;
  };
  s.entities = {make("f", Category::figure, {0, 0, 30, 10}),
                make("g1", Category::figure_graphic, {0, 0, 10, 10}),
                make("g2", Category::figure_graphic, {20, 0, 30, 10})};
  s.relations = {{"f", "g1", RelationType::parent_of},
                 {"f", "g2", RelationType::parent_of}};
  const auto violations = check_conformance(s, Grammar::default_grammar());
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].rule == "max_count_exceeded");
  CHECK(violations[0].subject == "f");
}
