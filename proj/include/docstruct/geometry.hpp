#pragma once

#include <optional>
#include <span>

namespace docstruct {

// Axis-aligned rectangle in page coordinates. Origin is the page's top-left
// corner, y grows downward. Edges are inclusive: boxes that merely touch
// still intersect (in a zero-area rectangle).
struct BBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool valid() const { return x0 <= x1 && y0 <= y1; }

  bool operator==(const BBox&) const = default;
};

double area(const BBox& b);

// Zero-area box (a line segment or a point).
bool is_degenerate(const BBox& b);

// std::nullopt when the boxes are disjoint. Touching edges produce a
// zero-area rectangle, not nullopt.
std::optional<BBox> intersection(const BBox& a, const BBox& b);

// Intersection over union. Throws std::invalid_argument when both boxes are
// degenerate (the ratio is undefined for such a pair).
double iou(const BBox& a, const BBox& b);

// Fraction of obj covered by subj: area(subj ∩ obj) / area(obj).
// Throws std::invalid_argument when obj has zero area.
double overlap_fraction(const BBox& subj, const BBox& obj);

// Smallest box enclosing all inputs. Throws std::invalid_argument on an
// empty span.
BBox union_bbox(std::span<const BBox> boxes);

BBox union_of(const BBox& a, const BBox& b);

// Inclusive containment; a box contains itself.
bool contains(const BBox& outer, const BBox& inner);

}  // namespace docstruct
