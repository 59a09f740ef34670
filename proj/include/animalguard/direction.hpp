#pragma once

#include <optional>
#include <span>

#include "animalguard/detection_io.hpp"
#include "animalguard/geometry.hpp"

namespace animalguard {

struct HistoryEntry {
    FrameIndex frame_index = 0;
    Point2 centroid;

    friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// Unit direction of motion plus the raw displacement magnitude it was derived from.
struct DirectionEstimate {
    Point2 vector;           // unit length
    double magnitude = 0.0;  // pixels over the window, before normalization
    FrameIndex at_frame = 0;

    friend bool operator==(const DirectionEstimate&, const DirectionEstimate&) = default;
};

/// Number of sequential history entries spanned by one direction estimate.
inline constexpr std::size_t kDirectionWindow = 5;

/// Displacement between the newest entry and the one four entries earlier. Discarded
/// (nullopt) when fewer than five entries exist or the magnitude is <= min_magnitude.
std::optional<DirectionEstimate> compute_direction(std::span<const HistoryEntry> history,
                                                   double min_magnitude);

}  // namespace animalguard
