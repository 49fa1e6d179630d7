#include "docstruct/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace docstruct {

double area(const BBox& b) { return b.width() * b.height(); }

bool is_degenerate(const BBox& b) { return area(b) == 0.0; }

std::optional<BBox> intersection(const BBox& a, const BBox& b) {
  const double ix0 = std::max(a.x0, b.x0);
  const double iy0 = std::max(a.y0, b.y0);
  const double ix1 = std::min(a.x1, b.x1);
  const double iy1 = std::min(a.y1, b.y1);
  if (ix0 > ix1 || iy0 > iy1) return std::nullopt;
  return BBox{ix0, iy0, ix1, iy1};
}

double iou(const BBox& a, const BBox& b) {
  if (is_degenerate(a) && is_degenerate(b))
    throw std::invalid_argument("iou: degenerate pair");
  const auto inter = intersection(a, b);
  if (!inter) return 0.0;
  const double ai = area(*inter);
  const double au = area(a) + area(b) - ai;
  if (au == 0.0) return 0.0;
  return ai / au;
}

double overlap_fraction(const BBox& subj, const BBox& obj) {
  if (is_degenerate(obj))
    throw std::invalid_argument("overlap_fraction: zero-area object box");
  const auto inter = intersection(subj, obj);
  if (!inter) return 0.0;
  return area(*inter) / area(obj);
}

BBox union_bbox(std::span<const BBox> boxes) {
  if (boxes.empty())
    throw std::invalid_argument("union_bbox: empty input");
  BBox u = boxes.front();
  for (const BBox& b : boxes.subspan(1)) {
    u.x0 = std::min(u.x0, b.x0);
    u.y0 = std::min(u.y0, b.y0);
    u.x1 = std::max(u.x1, b.x1);
    u.y1 = std::max(u.y1, b.y1);
  }
  return u;
}

BBox union_of(const BBox& a, const BBox& b) {
  const BBox both[] = {a, b};
  return union_bbox(both);
}

bool contains(const BBox& outer, const BBox& inner) {
  return outer.x0 <= inner.x0 && outer.y0 <= inner.y0 &&
         outer.x1 >= inner.x1 && outer.y1 >= inner.y1;
}

}  // namespace docstruct
