#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "animalguard/detection_io.hpp"
#include "animalguard/evaluation.hpp"
#include "animalguard/image.hpp"
#include "animalguard/lane_detector.hpp"

namespace animalguard {

enum class ScenarioKind { EntersLane, CrossesAway, StaticOffLane, InLaneFromStart, MultiAnimal };

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> scenario_kind_from_string(std::string_view s);

/// One simulated animal moving on a straight line at constant velocity.
struct AnimalSpec {
    std::string class_name = "cow";
    Point2 start;     // box bottom-center at frame 0
    Point2 velocity;  // px per frame
    double box_width = 50.0;
    double box_height = 40.0;
    FrameIndex appear = 0;
    std::optional<FrameIndex> vanish;  // first frame no longer emitted
};

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::EntersLane;
    std::string video_id = "sim";
    int frame_count = 120;
    int width = 640;
    int height = 480;
    LaneSegment left{{120, 480}, {300, 288}};
    LaneSegment right{{520, 480}, {340, 288}};
    std::vector<AnimalSpec> animals;
    double jitter_sigma = 0.5;
    std::uint64_t seed = 0;
};

class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ScenarioSpec parse_scenario_spec(std::string_view text);
std::string serialize_scenario_spec(const ScenarioSpec& spec);

/// Jitter source: std::mt19937_64 seeded with ScenarioSpec::seed, uniforms from the top
/// 53 bits, normals by Box-Muller (cosine branch).
inline constexpr std::string_view kJitterAlgorithm = "mt19937_64/box-muller";

struct ScenarioOutputs {
    std::vector<FrameDetections> frames;
    std::vector<LaneModel> lanes;
    GroundTruth truth;
    std::string detections_jsonl;
    std::string lanes_jsonl;
    std::string truth_json;
};

/// Deterministic in (spec, seed). Throws SpecError for invalid specs, for EntersLane
/// specs whose animals never reach the lane, and for MultiAnimal specs whose emitted
/// centroids break the nearest-centroid assumption.
ScenarioOutputs generate(const ScenarioSpec& spec);

/// Noise-free box of an animal at a frame (before clipping to the image).
BBox animal_box(const AnimalSpec& animal, FrameIndex frame);

LaneModel spec_lane(const ScenarioSpec& spec, FrameIndex frame = 0);

/// Black frame with both lane lines drawn as 6 px wide anti-aliased strokes.
GrayImage render_lane_frame(const ScenarioSpec& spec, FrameIndex frame_index);

/// Draws a random but valid spec of the given kind. Same (kind, seed) gives the same spec.
ScenarioSpec sample_scenario(ScenarioKind kind, std::uint64_t seed);

/// Writes detections.jsonl, lanes.jsonl, truth.json and, when render_frames is set,
/// frames/<video_id>_<frame:06d>.pgm.
void write_scenario(const ScenarioSpec& spec, const ScenarioOutputs& outputs,
                    const std::filesystem::path& dir, bool render_frames);

/// "<video_id>_<frame_index:06d>.pgm"
std::string frame_file_name(std::string_view video_id, FrameIndex frame_index,
                            std::string_view ext = ".pgm");

}  // namespace animalguard
