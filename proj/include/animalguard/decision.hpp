#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "animalguard/direction.hpp"
#include "animalguard/lane_detector.hpp"
#include "animalguard/tracker.hpp"

namespace animalguard {

enum class AlertType { StopInLane, StopPredicted };

std::string_view to_string(AlertType type);
std::optional<AlertType> alert_type_from_string(std::string_view s);

struct AlertRecord {
    FrameIndex frame_index = 0;
    TrackId track_id = 0;
    std::string class_name;
    AlertType alert_type = AlertType::StopInLane;
    BBox box;
    std::optional<DirectionEstimate> direction;  // always set for StopPredicted
    LaneStatus lane_status = LaneStatus::Unknown;
};

struct DecisionParams {
    double toward_min_component = 0.2;
};

/// Everything the engine decided for one frame.
struct FrameDecision {
    FrameIndex frame_index = 0;
    LaneStatus lane_status = LaneStatus::Unknown;
    std::vector<AlertRecord> alerts;
    /// Live tracks outside the lane that raised no alert (decision instances without an alert).
    int quiet_outside_lane = 0;
};

/// Bottom-center of the box lies inside the lane trapezoid (boundaries inclusive).
bool is_in_lane(const BBox& box, const LaneModel& lane);

/// Box center x lies between the two lane-segment horizontal midpoints (inclusive).
bool is_in_vicinity(const BBox& box, const LaneModel& lane);

/// The x component of the unit direction points toward the lane center by more than
/// min_component. A box centered exactly on the lane center counts as moving toward it.
bool is_moving_toward_lane(const DirectionEstimate& direction, const BBox& box,
                           const LaneModel& lane, double min_component = 0.2);

/// Per track, first rule wins: in lane -> StopInLane; outside but in vicinity and heading
/// toward the lane -> StopPredicted; otherwise nothing. No alerts while the lane is Unknown.
FrameDecision decide(FrameIndex frame_index, std::span<const TrackState> tracks,
                     const LaneState& lane_state, const DecisionParams& params = {});

// Alert log: one JSON line per frame.
std::string serialize_decision(const FrameDecision& decision);
FrameDecision parse_decision_line(std::string_view line, std::size_t line_number = 1);

}  // namespace animalguard
