#pragma once

#include <cstdint>
#include <vector>

#include "docstruct/model.hpp"
#include "docstruct/weak_labels_types.hpp"

namespace docstruct {

// A figure or table placed in the page flow. Tables always sit inside a
// single column so their grid stays in one layout group; figures may span
// the full page width. Grids below 2x2 collapse into degenerate geometry
// (a lone row equals its tabular), so rows and cols are clamped to 2.
struct FloatSpec {
  Category kind = Category::figure;
  int rows = 2;
  int cols = 2;
  bool full_width = false;
};

struct PageSpec {
  std::uint64_t seed = 0;
  int columns = 2;              // 1 or 2
  int blocks_per_column = 3;
  std::vector<FloatSpec> floats;
  bool include_meta = false;    // header, footer, page number
};

// Detection noise applied on top of a ground-truth page. All draws come
// from one seeded generator, so equal specs give equal output.
struct NoiseSpec {
  double jitter = 0.0;          // max absolute shift per box edge, px
  double drop_rate = 0.0;       // chance an entity goes missing
  double relabel_rate = 0.0;    // chance an entity changes category
  double confidence_base = 1.0;
  double confidence_jitter = 0.0;
  std::uint64_t seed = 0;
};

struct GeneratedPage {
  DocStructure ground_truth;
  std::vector<RenderRecord> records;
};

// Lays out a 1200x1600 page: stacked text blocks in one or two columns,
// floats threaded through the flow, full-width floats splitting two-column
// text into stripes. Ground-truth relations follow the reading order the
// layout implies; records replay the page as a token stream for the weak
// labeling path. Deterministic in the spec.
GeneratedPage generate_page(const PageSpec& spec);

// A varied but deterministic page layout for corpus-style tests.
PageSpec random_page_spec(std::uint64_t seed);

// Flat noisy detections: entities keep their ground-truth ids, get jittered
// boxes, confidences, occasional drops and relabels, and a shuffled order.
std::vector<Entity> perturb(const DocStructure& ground_truth, const NoiseSpec& noise);

}  // namespace docstruct
