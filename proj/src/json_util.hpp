#pragma once

// Internal JSON helpers shared by the file-format readers.

#include <nlohmann/json.hpp>
#include <optional>

#include "animalguard/geometry.hpp"

namespace animalguard::detail {

inline std::optional<BBox> box_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4) return std::nullopt;
    for (const auto& v : j)
        if (!v.is_number()) return std::nullopt;
    return BBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline std::optional<Point2> point_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        return std::nullopt;
    return Point2{j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::ordered_json to_json(const BBox& b) { return {b.x1, b.y1, b.x2, b.y2}; }
inline nlohmann::ordered_json to_json(const Point2& p) { return {p.x, p.y}; }

}  // namespace animalguard::detail
