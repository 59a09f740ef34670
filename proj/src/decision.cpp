#include "animalguard/decision.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "json_util.hpp"

namespace animalguard {

std::string_view to_string(AlertType type) {
    return type == AlertType::StopInLane ? "STOP_IN_LANE" : "STOP_PREDICTED";
}

std::optional<AlertType> alert_type_from_string(std::string_view s) {
    if (s == "STOP_IN_LANE") return AlertType::StopInLane;
    if (s == "STOP_PREDICTED") return AlertType::StopPredicted;
    return std::nullopt;
}

bool is_in_lane(const BBox& box, const LaneModel& lane) {
    const Point2 p = bottom_center(box);
    const double y_top = std::max(lane.left.top.y, lane.right.top.y);
    const double y_bottom = std::min(lane.left.bottom.y, lane.right.bottom.y);
    if (p.y < y_top || p.y > y_bottom) return false;
    return lane.left.x_at(p.y) <= p.x && p.x <= lane.right.x_at(p.y);
}

bool is_in_vicinity(const BBox& box, const LaneModel& lane) {
    const double cx = (box.x1 + box.x2) / 2.0;
    return lane.left.mid_x() <= cx && cx <= lane.right.mid_x();
}

bool is_moving_toward_lane(const DirectionEstimate& direction, const BBox& box,
                           const LaneModel& lane, double min_component) {
    const double lane_center = (lane.left.mid_x() + lane.right.mid_x()) / 2.0;
    const double cx = (box.x1 + box.x2) / 2.0;
    if (cx == lane_center) return true;
    const double sign = lane_center > cx ? 1.0 : -1.0;
    return sign * direction.vector.x > min_component;
}

FrameDecision decide(FrameIndex frame_index, std::span<const TrackState> tracks,
                     const LaneState& lane_state, const DecisionParams& params) {
    FrameDecision out;
    out.frame_index = frame_index;
    out.lane_status = lane_state.status;
    if (lane_state.status == LaneStatus::Unknown || !lane_state.current) return out;
    const LaneModel& lane = *lane_state.current;

    for (const auto& t : tracks) {
        AlertRecord alert{frame_index, t.id,        t.class_name,    AlertType::StopInLane,
                          t.box,       std::nullopt, lane_state.status};
        if (is_in_lane(t.box, lane)) {
            alert.direction = t.last_direction;
            out.alerts.push_back(std::move(alert));
            continue;
        }
        if (t.last_direction && is_in_vicinity(t.box, lane) &&
            is_moving_toward_lane(*t.last_direction, t.box, lane, params.toward_min_component)) {
            alert.alert_type = AlertType::StopPredicted;
            alert.direction = t.last_direction;
            out.alerts.push_back(std::move(alert));
            continue;
        }
        ++out.quiet_outside_lane;
    }
    return out;
}

std::string serialize_decision(const FrameDecision& decision) {
    nlohmann::ordered_json j;
    j["frame_index"] = decision.frame_index;
    j["lane_status"] = to_string(decision.lane_status);
    auto alerts = nlohmann::ordered_json::array();
    for (const auto& a : decision.alerts) {
        nlohmann::ordered_json aj;
        aj["track_id"] = a.track_id;
        aj["class_name"] = a.class_name;
        aj["alert_type"] = to_string(a.alert_type);
        aj["bbox"] = detail::to_json(a.box);
        if (a.direction) aj["direction"] = detail::to_json(a.direction->vector);
        alerts.push_back(std::move(aj));
    }
    j["alerts"] = std::move(alerts);
    j["quiet_outside_lane"] = decision.quiet_outside_lane;
    return j.dump();
}

FrameDecision parse_decision_line(std::string_view line, std::size_t line_number) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_number, e.what());
    }
    if (!j.is_object()) throw ParseError(line_number, "alert record is not a JSON object");

    FrameDecision d;
    const auto idx = j.find("frame_index");
    if (idx == j.end() || !idx->is_number_integer())
        throw ValidationError(line_number, "frame_index", "missing or not an integer");
    d.frame_index = idx->get<FrameIndex>();

    const auto st = j.find("lane_status");
    std::optional<LaneStatus> status;
    if (st != j.end() && st->is_string()) status = lane_status_from_string(st->get<std::string>());
    if (!status) throw ValidationError(line_number, "lane_status", "expected FRESH|HELD|UNKNOWN");
    d.lane_status = *status;

    const auto alerts = j.find("alerts");
    if (alerts == j.end() || !alerts->is_array())
        throw ValidationError(line_number, "alerts", "missing or not an array");
    for (std::size_t i = 0; i < alerts->size(); ++i) {
        const auto& aj = (*alerts)[i];
        const std::string path = "alerts[" + std::to_string(i) + "]";
        AlertRecord a;
        a.frame_index = d.frame_index;
        a.lane_status = d.lane_status;
        if (!aj.is_object()) throw ValidationError(line_number, path, "expected an object");
        const auto tid = aj.find("track_id");
        if (tid == aj.end() || !tid->is_number_unsigned())
            throw ValidationError(line_number, path + ".track_id", "missing or not an integer");
        a.track_id = tid->get<TrackId>();
        const auto cls = aj.find("class_name");
        if (cls == aj.end() || !cls->is_string())
            throw ValidationError(line_number, path + ".class_name", "missing or not a string");
        a.class_name = cls->get<std::string>();
        const auto type = aj.find("alert_type");
        std::optional<AlertType> at;
        if (type != aj.end() && type->is_string()) at = alert_type_from_string(type->get<std::string>());
        if (!at) throw ValidationError(line_number, path + ".alert_type", "unknown alert type");
        a.alert_type = *at;
        const auto bbox = aj.find("bbox");
        auto box = bbox == aj.end() ? std::nullopt : detail::box_from_json(*bbox);
        if (!box) throw ValidationError(line_number, path + ".bbox", "expected [x1,y1,x2,y2]");
        a.box = *box;
        if (const auto dir = aj.find("direction"); dir != aj.end()) {
            auto v = detail::point_from_json(*dir);
            if (!v) throw ValidationError(line_number, path + ".direction", "expected [dx,dy]");
            a.direction = DirectionEstimate{*v, 0.0, d.frame_index};
        }
        if (a.alert_type == AlertType::StopPredicted && !a.direction)
            throw ValidationError(line_number, path + ".direction", "required for STOP_PREDICTED");
        d.alerts.push_back(std::move(a));
    }
    if (const auto q = j.find("quiet_outside_lane"); q != j.end()) {
        if (!q->is_number_unsigned())
            throw ValidationError(line_number, "quiet_outside_lane", "not a nonnegative integer");
        d.quiet_outside_lane = q->get<int>();
    }
    return d;
}

}  // namespace animalguard
