#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "animalguard/detection_io.hpp"
#include "animalguard/geometry.hpp"
#include "animalguard/image.hpp"

namespace animalguard {

/// One lane boundary, running from the image bottom up toward the horizon.
struct LaneSegment {
    Point2 bottom;
    Point2 top;

    /// Horizontal midpoint of the segment.
    [[nodiscard]] double mid_x() const { return (bottom.x + top.x) / 2.0; }

    /// x on the segment's supporting line at height y (extrapolates outside the segment).
    [[nodiscard]] double x_at(double y) const;

    friend bool operator==(const LaneSegment&, const LaneSegment&) = default;
};

struct LaneModel {
    LaneSegment left;
    LaneSegment right;
    FrameIndex source_frame = 0;

    friend bool operator==(const LaneModel&, const LaneModel&) = default;
};

/// Checks endpoint ordering, left/right ordering and midpoint ordering.
std::optional<std::string> lane_violation(const LaneModel& lane);

struct LaneParams {
    int blur_kernel = 5;
    double blur_sigma = 1.0;
    double canny_low = 50.0;
    double canny_high = 150.0;
    // ROI trapezoid as fractions of width/height.
    double roi_bottom_left = 0.05;
    double roi_bottom_right = 0.95;
    double roi_top_left = 0.45;
    double roi_top_right = 0.55;
    double roi_top = 0.6;
    double hough_rho = 2.0;
    double hough_theta_deg = 1.0;
    int hough_threshold = 15;
    double min_line_length = 40.0;
    double max_line_gap = 20.0;
    double min_abs_slope = 0.5;
    double horizon_frac = 0.6;
};

/// 255 inside the ROI trapezoid, 0 outside. Pixels outside never influence detect_lane.
GrayImage roi_mask(int width, int height, const LaneParams& params);

/// Blur, hysteresis edges, ROI mask, probabilistic line voting, slope split and a
/// length-weighted (slope, intercept) average per side. Absent when either side has
/// no qualifying segment or the fitted model is inconsistent.
std::optional<LaneModel> detect_lane(const GrayImage& frame, const LaneParams& params,
                                     FrameIndex frame_index = 0);

enum class LaneStatus { Fresh, Held, Unknown };

std::string_view to_string(LaneStatus status);
std::optional<LaneStatus> lane_status_from_string(std::string_view s);

struct LaneState {
    std::optional<LaneModel> current;
    int age = 0;  // frames since the last successful detection
    LaneStatus status = LaneStatus::Unknown;
};

/// Holds the last model for up to hold_limit missed frames, then drops to Unknown.
LaneState update_lane_state(const LaneState& state, const std::optional<LaneModel>& detected,
                            int hold_limit);

// Lane file: one JSON object per line,
// {"frame_index": n, "left": [[x,y],[x,y]], "right": [[x,y],[x,y]]}, bottom end first.

std::string serialize_lane(const LaneModel& lane);
LaneModel parse_lane_line(std::string_view line, std::size_t line_number = 1);

/// Streaming lane-file reader; frame indices must increase strictly.
class LaneFileReader {
public:
    explicit LaneFileReader(std::istream& in) : in_(in) {}
    std::optional<LaneModel> next();

private:
    std::istream& in_;
    std::size_t line_number_ = 0;
    std::optional<FrameIndex> last_;
};

}  // namespace animalguard
