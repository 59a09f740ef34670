#include "animalguard/direction.hpp"

#include <cmath>

namespace animalguard {

std::optional<DirectionEstimate> compute_direction(std::span<const HistoryEntry> history,
                                                   double min_magnitude) {
    if (history.size() < kDirectionWindow) return std::nullopt;
    const HistoryEntry& newest = history.back();
    const HistoryEntry& oldest = history[history.size() - kDirectionWindow];
    const double di = newest.centroid.x - oldest.centroid.x;
    const double dj = newest.centroid.y - oldest.centroid.y;
    const double magnitude = std::sqrt(di * di + dj * dj);
    if (!(magnitude > min_magnitude) || magnitude == 0.0) return std::nullopt;
    return DirectionEstimate{{di / magnitude, dj / magnitude}, magnitude, newest.frame_index};
}

}  // namespace animalguard
