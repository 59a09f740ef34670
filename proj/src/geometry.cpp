#include "animalguard/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace animalguard {

std::optional<std::string> bbox_violation(const BBox& box) {
    if (!std::isfinite(box.x1) || !std::isfinite(box.y1) || !std::isfinite(box.x2) ||
        !std::isfinite(box.y2)) {
        return "non-finite coordinate";
    }
    if (box.x1 < 0 || box.y1 < 0 || box.x2 < 0 || box.y2 < 0) return "negative coordinate";
    if (box.x2 < box.x1) return "x2 < x1";
    if (box.y2 < box.y1) return "y2 < y1";
    return std::nullopt;
}

Point2 centroid(const BBox& box) {
    return {(box.x1 + box.x2) / 2.0, (box.y1 + box.y2) / 2.0};
}

Point2 bottom_center(const BBox& box) {
    return {(box.x1 + box.x2) / 2.0, box.y2};
}

double iou(const BBox& a, const BBox& b) {
    const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double distance(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace animalguard
