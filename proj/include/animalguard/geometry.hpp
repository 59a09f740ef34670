#pragma once

#include <optional>
#include <string>

namespace animalguard {

/// Image-plane point. Origin top-left, x right, y down; sub-pixel values allowed.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Axis-aligned box in pixel coordinates. Width and height are (x2-x1) and (y2-y1).
struct BBox {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    [[nodiscard]] double width() const { return x2 - x1; }
    [[nodiscard]] double height() const { return y2 - y1; }
    [[nodiscard]] double area() const { return width() * height(); }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Returns a description of the first violated invariant ("x2 < x1", ...), or nullopt.
std::optional<std::string> bbox_violation(const BBox& box);

Point2 centroid(const BBox& box);

/// Ground-contact proxy: ((x1+x2)/2, y2).
Point2 bottom_center(const BBox& box);

/// Intersection over union. Disjoint boxes and pairs with zero union give 0.
double iou(const BBox& a, const BBox& b);

double distance(const Point2& a, const Point2& b);

}  // namespace animalguard
