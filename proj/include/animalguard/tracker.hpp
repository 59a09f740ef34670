#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "animalguard/detection_io.hpp"
#include "animalguard/direction.hpp"
#include "animalguard/geometry.hpp"

namespace animalguard {

using TrackId = std::uint64_t;

struct TrackState {
    TrackId id = 0;
    std::string class_name;
    Point2 centroid;
    BBox box;
    std::deque<HistoryEntry> history;  // oldest first, at most history_len entries
    int disappeared = 0;
    std::optional<DirectionEstimate> last_direction;
};

struct TrackerConfig {
    int max_disappeared = 10;
    std::optional<double> max_match_distance;  // nullopt = unbounded
    std::size_t history_len = kDirectionWindow;

    /// Match gate of a quarter of the frame diagonal.
    static double default_match_distance(int width, int height);
};

/// Live tracks (ordered by id) plus the id counter, which never goes backwards.
struct TrackerState {
    std::vector<TrackState> tracks;
    TrackId next_id = 0;
};

struct FrameAssignments {
    std::vector<std::pair<TrackId, std::size_t>> matches;     // existing track, detection index
    std::vector<std::pair<TrackId, std::size_t>> registered;  // new track, detection index
    std::vector<TrackId> deregistered;

    /// Track that now owns detection det (matched or newly registered).
    [[nodiscard]] std::optional<TrackId> track_for_detection(std::size_t det) const;
};

struct TrackerUpdate {
    TrackerState state;
    FrameAssignments assignments;
};

/// One step of centroid tracking: greedy nearest-centroid matching (ties go to the lower
/// track id, then the lower detection index), registration of unmatched detections, and
/// deregistration once a track has been missing for more than max_disappeared frames.
TrackerUpdate tracker_update(const TrackerState& state, const FrameDetections& frame,
                             const TrackerConfig& cfg);

/// Replaces last_direction with a fresh estimate when the track's newest history entry
/// is at current_frame; otherwise keeps the old one while younger than direction_ttl.
TrackState update_track_direction(TrackState track, double min_magnitude, int direction_ttl,
                                  FrameIndex current_frame);

}  // namespace animalguard
