#pragma once

#include <string>
#include <vector>

#include "docstruct/model.hpp"
#include "docstruct/weak_labels_types.hpp"

namespace docstruct {

// Structure files:
// {
//   "page": {"width": W, "height": H},
//   "entities": [{"id", "category", "bbox": [x0,y0,x1,y1],
//                 "confidence"?, "cell_range"?}, ...],
//   "relations": [{"subject", "object", "type"}, ...]
// }
// Weak-label output adds a top-level "noisy": true.
std::string structure_to_json_text(const DocStructure& s, bool noisy = false);
DocStructure structure_from_json_text(const std::string& text);
DocStructure read_structure_file(const std::string& path);
void write_structure_file(const std::string& path, const DocStructure& s,
                          bool noisy = false);

// Render records are stored line-delimited, one JSON object per record:
// {"bbox": [...], "page": N, "kind": "text_token|environment_begin|
//  environment_end|command", "env"?, "command"?, "stack"?: [...]}
std::string record_to_json_line(const RenderRecord& r);
RenderRecord record_from_json_line(const std::string& line);
std::vector<RenderRecord> read_records_file(const std::string& path);
void write_records_file(const std::string& path,
                        const std::vector<RenderRecord>& records);

// Writes via a temp file in the same directory plus rename, so readers
// never observe a half-written file.
void write_text_file_atomic(const std::string& path, const std::string& text);

}  // namespace docstruct
