#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "animalguard/decision.hpp"
#include "animalguard/detection_io.hpp"
#include "animalguard/lane_detector.hpp"
#include "animalguard/tracker.hpp"

namespace animalguard {

struct PipelineConfig {
    FilterConfig filter;
    TrackerConfig tracker;
    /// Derive max_match_distance from the frame size when it is known and none is set.
    bool auto_match_distance = true;
    int frame_width = 0;  // 0 = unknown until a frame image is read
    int frame_height = 0;
    LaneParams lane;
    int hold_limit = 30;
    double min_magnitude = 5.0;
    int direction_ttl = 10;
    DecisionParams decision;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat "key = value" file. Unknown keys are rejected; missing keys keep their defaults.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::istream& in);

/// Every knob with its current value, in the format load_config reads.
std::string dump_config(const PipelineConfig& cfg);

/// Checks component invariants; throws ConfigError.
void validate_config(const PipelineConfig& cfg);

class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-stream engine state: tracker, directions, lane hold. Not shared across streams.
class AlertEngine {
public:
    explicit AlertEngine(PipelineConfig cfg);

    /// Sets the frame size (enables the automatic match gate).
    void set_frame_size(int width, int height);

    /// One frame: filter, track, update directions, fold in the lane result, decide.
    FrameDecision step(const FrameDetections& frame, const std::optional<LaneModel>& detected_lane);

    [[nodiscard]] const TrackerState& tracker_state() const { return tracker_; }
    [[nodiscard]] const LaneState& lane_state() const { return lane_; }
    [[nodiscard]] const FrameAssignments& last_assignments() const { return assignments_; }

private:
    PipelineConfig cfg_;
    TrackerState tracker_;
    LaneState lane_;
    FrameAssignments assignments_;
};

struct FramesDirSource {
    std::filesystem::path dir;
};

struct LaneFileSource {
    std::istream* in = nullptr;
};

using LaneSource = std::variant<FramesDirSource, LaneFileSource>;

/// Streams detections through the engine and writes one alert-log line per input frame.
/// Returns the number of frames processed.
std::size_t run_pipeline(std::istream& detections, const LaneSource& lanes,
                         const PipelineConfig& cfg, std::ostream& alert_log);

/// Frame image for a frame index: <dir>/<video>_<idx:06d>.pgm, else .ppm; nullopt if neither.
std::optional<std::filesystem::path> find_frame_image(const std::filesystem::path& dir,
                                                      const std::string& video_id,
                                                      FrameIndex frame_index);

}  // namespace animalguard
