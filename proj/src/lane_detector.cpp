#include "animalguard/lane_detector.hpp"

#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <opencv2/imgproc.hpp>

#include "json_util.hpp"

namespace animalguard {

double LaneSegment::x_at(double y) const {
    const double dy = top.y - bottom.y;
    if (dy == 0.0) return bottom.x;
    return bottom.x + (y - bottom.y) * (top.x - bottom.x) / dy;
}

std::optional<std::string> lane_violation(const LaneModel& lane) {
    for (const auto* seg : {&lane.left, &lane.right}) {
        for (double v : {seg->bottom.x, seg->bottom.y, seg->top.x, seg->top.y})
            if (!std::isfinite(v)) return "non-finite coordinate";
        if (seg->bottom.y < seg->top.y) return "bottom end above top end";
    }
    if (!(lane.left.bottom.x < lane.right.bottom.x)) return "left bottom not left of right bottom";
    if (!(lane.left.mid_x() < lane.right.mid_x())) return "left midpoint not left of right midpoint";
    return std::nullopt;
}

namespace {

cv::Mat as_mat(const GrayImage& img) {
    // Read-only view; the callers below never write through it.
    return cv::Mat(img.height, img.width, CV_8UC1,
                   const_cast<std::uint8_t*>(img.pixels.data()));
}

std::vector<cv::Point> roi_polygon(int w, int h, const LaneParams& p) {
    const double top = p.roi_top * h;
    return {
        cv::Point(static_cast<int>(std::lround(p.roi_bottom_left * w)), h),
        cv::Point(static_cast<int>(std::lround(p.roi_top_left * w)),
                  static_cast<int>(std::lround(top))),
        cv::Point(static_cast<int>(std::lround(p.roi_top_right * w)),
                  static_cast<int>(std::lround(top))),
        cv::Point(static_cast<int>(std::lround(p.roi_bottom_right * w)), h),
    };
}

struct SideFit {
    double weight = 0.0;
    double slope_sum = 0.0;
    double intercept_sum = 0.0;

    void add(double slope, double intercept, double length) {
        weight += length;
        slope_sum += slope * length;
        intercept_sum += intercept * length;
    }

    std::optional<LaneSegment> segment(double y_bottom, double y_top) const {
        if (weight <= 0.0) return std::nullopt;
        const double m = slope_sum / weight;
        const double b = intercept_sum / weight;
        if (m == 0.0 || !std::isfinite(m)) return std::nullopt;
        return LaneSegment{{(y_bottom - b) / m, y_bottom}, {(y_top - b) / m, y_top}};
    }
};

}  // namespace

GrayImage roi_mask(int width, int height, const LaneParams& params) {
    GrayImage mask(width, height, 0);
    cv::Mat m(height, width, CV_8UC1, mask.pixels.data());
    const std::vector<std::vector<cv::Point>> polys{roi_polygon(width, height, params)};
    cv::fillPoly(m, polys, cv::Scalar(255));
    return mask;
}

std::optional<LaneModel> detect_lane(const GrayImage& frame, const LaneParams& params,
                                     FrameIndex frame_index) {
    if (!frame.valid()) return std::nullopt;
    const int w = frame.width;
    const int h = frame.height;

    // Zero everything outside the ROI first so exterior pixels cannot leak in via the blur.
    const GrayImage mask_img = roi_mask(w, h, params);
    const cv::Mat mask = as_mat(mask_img);
    cv::Mat masked = cv::Mat::zeros(h, w, CV_8UC1);
    as_mat(frame).copyTo(masked, mask);

    cv::Mat blurred;
    const int k = params.blur_kernel | 1;
    cv::GaussianBlur(masked, blurred, cv::Size(k, k), params.blur_sigma, params.blur_sigma,
                     cv::BORDER_REPLICATE);
    cv::Mat edges;
    cv::Canny(blurred, edges, params.canny_low, params.canny_high);

    // The ROI cut itself produces edges; drop a band the width of the filter support.
    const int margin = k / 2 + 2;
    cv::Mat inner;
    cv::erode(mask, inner,
              cv::getStructuringElement(cv::MORPH_RECT, cv::Size(2 * margin + 1, 2 * margin + 1)),
              cv::Point(-1, -1), 1, cv::BORDER_CONSTANT, cv::Scalar(0));
    cv::Mat roi_edges;
    cv::bitwise_and(edges, inner, roi_edges);

    std::vector<cv::Vec4i> lines;
    cv::HoughLinesP(roi_edges, lines, params.hough_rho,
                    params.hough_theta_deg * std::numbers::pi / 180.0, params.hough_threshold,
                    params.min_line_length, params.max_line_gap);

    SideFit left;
    SideFit right;
    for (const auto& l : lines) {
        const double dx = l[2] - l[0];
        const double dy = l[3] - l[1];
        if (dx == 0.0) continue;
        const double slope = dy / dx;
        if (std::abs(slope) < params.min_abs_slope) continue;
        const double intercept = l[1] - slope * l[0];
        const double length = std::hypot(dx, dy);
        (slope < 0 ? left : right).add(slope, intercept, length);
    }

    const double y_bottom = h;
    const double y_top = params.horizon_frac * h;
    auto l = left.segment(y_bottom, y_top);
    auto r = right.segment(y_bottom, y_top);
    if (!l || !r) return std::nullopt;
    LaneModel model{*l, *r, frame_index};
    if (lane_violation(model)) return std::nullopt;
    return model;
}

std::string_view to_string(LaneStatus status) {
    switch (status) {
        case LaneStatus::Fresh: return "FRESH";
        case LaneStatus::Held: return "HELD";
        case LaneStatus::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

std::optional<LaneStatus> lane_status_from_string(std::string_view s) {
    if (s == "FRESH") return LaneStatus::Fresh;
    if (s == "HELD") return LaneStatus::Held;
    if (s == "UNKNOWN") return LaneStatus::Unknown;
    return std::nullopt;
}

LaneState update_lane_state(const LaneState& state, const std::optional<LaneModel>& detected,
                            int hold_limit) {
    if (detected) return LaneState{detected, 0, LaneStatus::Fresh};
    if (state.current && state.age < hold_limit)
        return LaneState{state.current, state.age + 1, LaneStatus::Held};
    return LaneState{std::nullopt, state.age + 1, LaneStatus::Unknown};
}

std::string serialize_lane(const LaneModel& lane) {
    using detail::to_json;
    nlohmann::ordered_json j;
    j["frame_index"] = lane.source_frame;
    j["left"] = {to_json(lane.left.bottom), to_json(lane.left.top)};
    j["right"] = {to_json(lane.right.bottom), to_json(lane.right.top)};
    return j.dump();
}

LaneModel parse_lane_line(std::string_view line, std::size_t line_number) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_number, e.what());
    }
    if (!j.is_object()) throw ParseError(line_number, "lane record is not a JSON object");

    LaneModel lane;
    const auto idx = j.find("frame_index");
    if (idx == j.end() || !idx->is_number_integer() || idx->get<FrameIndex>() < 0)
        throw ValidationError(line_number, "frame_index", "missing or not a nonnegative integer");
    lane.source_frame = idx->get<FrameIndex>();

    auto read_side = [&](const char* key) {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_array() || it->size() != 2)
            throw ValidationError(line_number, key, "expected [[x,y],[x,y]]");
        auto b = detail::point_from_json((*it)[0]);
        auto t = detail::point_from_json((*it)[1]);
        if (!b || !t) throw ValidationError(line_number, key, "expected [[x,y],[x,y]]");
        return LaneSegment{*b, *t};
    };
    lane.left = read_side("left");
    lane.right = read_side("right");
    if (auto bad = lane_violation(lane)) throw ValidationError(line_number, "lane", *bad);
    return lane;
}

std::optional<LaneModel> LaneFileReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_number_;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        LaneModel lane = parse_lane_line(line, line_number_);
        if (last_ && lane.source_frame <= *last_)
            throw ValidationError(line_number_, "frame_index", "not strictly increasing");
        last_ = lane.source_frame;
        return lane;
    }
    return std::nullopt;
}

}  // namespace animalguard
