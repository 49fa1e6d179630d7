#include "docstruct/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace docstruct {

using nlohmann::json;

namespace {

json bbox_to_json(const BBox& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

BBox bbox_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw std::invalid_argument("bbox must be an array [x0, y0, x1, y1]");
  BBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
         j[3].get<double>()};
  if (!b.valid())
    throw std::invalid_argument("bbox has x1 < x0 or y1 < y0");
  return b;
}

json entity_to_json(const Entity& e) {
  json j;
  j["id"] = e.id;
  j["category"] = std::string(to_string(e.category));
  j["bbox"] = bbox_to_json(e.bbox);
  if (e.confidence) j["confidence"] = *e.confidence;
  if (e.cell_range) {
    j["cell_range"] = {{"row_start", e.cell_range->row_start},
                       {"row_end", e.cell_range->row_end},
                       {"col_start", e.cell_range->col_start},
                       {"col_end", e.cell_range->col_end}};
  }
  return j;
}

Entity entity_from_json(const json& j) {
  Entity e;
  e.id = j.at("id").get<std::string>();
  const auto cat_name = j.at("category").get<std::string>();
  const auto cat = category_from_string(cat_name);
  if (!cat) throw std::invalid_argument("unknown category '" + cat_name + "'");
  e.category = *cat;
  e.bbox = bbox_from_json(j.at("bbox"));
  if (j.contains("confidence")) e.confidence = j.at("confidence").get<double>();
  if (j.contains("cell_range")) {
    const json& cr = j.at("cell_range");
    e.cell_range = CellRange{cr.at("row_start").get<int>(), cr.at("row_end").get<int>(),
                             cr.at("col_start").get<int>(), cr.at("col_end").get<int>()};
  }
  return e;
}

}  // namespace

std::string structure_to_json_text(const DocStructure& s, bool noisy) {
  json j;
  j["page"] = {{"width", s.page_width}, {"height", s.page_height}};
  if (noisy) j["noisy"] = true;
  j["entities"] = json::array();
  for (const Entity& e : s.entities) j["entities"].push_back(entity_to_json(e));
  j["relations"] = json::array();
  for (const Relation& r : s.relations) {
    j["relations"].push_back({{"subject", r.subject},
                              {"object", r.object},
                              {"type", std::string(to_string(r.type))}});
  }
  return j.dump(2) + "\n";
}

DocStructure structure_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("structure file: ") + e.what());
  }
  DocStructure s;
  if (j.contains("page")) {
    s.page_width = j["page"].value("width", 0.0);
    s.page_height = j["page"].value("height", 0.0);
  }
  for (const json& je : j.value("entities", json::array()))
    s.entities.push_back(entity_from_json(je));
  for (const json& jr : j.value("relations", json::array())) {
    const auto type_name = jr.at("type").get<std::string>();
    const auto type = relation_type_from_string(type_name);
    if (!type) {
      if (type_name == "null") continue;  // explicit nulls are implicit here
      throw std::invalid_argument("unknown relation type '" + type_name + "'");
    }
    s.relations.push_back({jr.at("subject").get<std::string>(),
                           jr.at("object").get<std::string>(), *type});
  }
  return s;
}

DocStructure read_structure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return structure_from_json_text(buf.str());
}

void write_structure_file(const std::string& path, const DocStructure& s, bool noisy) {
  write_text_file_atomic(path, structure_to_json_text(s, noisy));
}

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::text_token: return "text_token";
    case TokenKind::environment_begin: return "environment_begin";
    case TokenKind::environment_end: return "environment_end";
    case TokenKind::command: return "command";
  }
  return "";
}

std::optional<TokenKind> token_kind_from_string(std::string_view name) {
  if (name == "text_token") return TokenKind::text_token;
  if (name == "environment_begin") return TokenKind::environment_begin;
  if (name == "environment_end") return TokenKind::environment_end;
  if (name == "command") return TokenKind::command;
  return std::nullopt;
}

std::string record_to_json_line(const RenderRecord& r) {
  json j;
  j["bbox"] = bbox_to_json(r.bbox);
  j["page"] = r.page;
  j["kind"] = std::string(to_string(r.kind));
  if (r.env_name) j["env"] = *r.env_name;
  if (r.command_name) j["command"] = *r.command_name;
  if (!r.nesting_stack.empty()) j["stack"] = r.nesting_stack;
  return j.dump();
}

RenderRecord record_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("record line: ") + e.what());
  }
  RenderRecord r;
  r.bbox = bbox_from_json(j.at("bbox"));
  r.page = j.value("page", 0);
  const auto kind_name = j.at("kind").get<std::string>();
  const auto kind = token_kind_from_string(kind_name);
  if (!kind) throw std::invalid_argument("unknown record kind '" + kind_name + "'");
  r.kind = *kind;
  if (j.contains("env")) r.env_name = j.at("env").get<std::string>();
  if (j.contains("command")) r.command_name = j.at("command").get<std::string>();
  if (j.contains("stack"))
    r.nesting_stack = j.at("stack").get<std::vector<std::string>>();
  return r;
}

std::vector<RenderRecord> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<RenderRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_records_file(const std::string& path, const std::vector<RenderRecord>& records) {
  std::string text;
  for (const RenderRecord& r : records) {
    text += record_to_json_line(r);
    text += '\n';
  }
  write_text_file_atomic(path, text);
}

void write_text_file_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

}  // namespace docstruct
