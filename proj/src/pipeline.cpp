#include "animalguard/pipeline.hpp"

#include <ostream>

#include "animalguard/image.hpp"
#include "animalguard/scenario_sim.hpp"

namespace animalguard {

AlertEngine::AlertEngine(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    validate_config(cfg_);
    if (cfg_.frame_width > 0 && cfg_.frame_height > 0)
        set_frame_size(cfg_.frame_width, cfg_.frame_height);
}

void AlertEngine::set_frame_size(int width, int height) {
    cfg_.frame_width = width;
    cfg_.frame_height = height;
    if (cfg_.auto_match_distance && !cfg_.tracker.max_match_distance)
        cfg_.tracker.max_match_distance = TrackerConfig::default_match_distance(width, height);
}

FrameDecision AlertEngine::step(const FrameDetections& frame,
                                const std::optional<LaneModel>& detected_lane) {
    const FrameDetections animals = filter_animals(frame, cfg_.filter);
    auto update = tracker_update(tracker_, animals, cfg_.tracker);
    tracker_ = std::move(update.state);
    assignments_ = std::move(update.assignments);
    for (auto& t : tracker_.tracks)
        t = update_track_direction(std::move(t), cfg_.min_magnitude, cfg_.direction_ttl,
                                   frame.frame_index);
    lane_ = update_lane_state(lane_, detected_lane, cfg_.hold_limit);
    return decide(frame.frame_index, tracker_.tracks, lane_, cfg_.decision);
}

std::optional<std::filesystem::path> find_frame_image(const std::filesystem::path& dir,
                                                      const std::string& video_id,
                                                      FrameIndex frame_index) {
    for (const char* ext : {".pgm", ".ppm"}) {
        auto p = dir / frame_file_name(video_id, frame_index, ext);
        if (std::filesystem::exists(p)) return p;
    }
    return std::nullopt;
}

namespace {

/// Aligns a lane file with the detection stream. Lane lines may skip frames (no lane
/// that frame) but every lane line must name a frame present in the detections.
class LaneFileCursor {
public:
    explicit LaneFileCursor(std::istream& in) : reader_(in) { pending_ = reader_.next(); }

    std::optional<LaneModel> take(FrameIndex frame) {
        if (!pending_) return std::nullopt;
        if (pending_->source_frame < frame) {
            throw PipelineError("lane file frame " + std::to_string(pending_->source_frame) +
                                " has no matching detection frame (next detection frame " +
                                std::to_string(frame) + ")");
        }
        if (pending_->source_frame > frame) return std::nullopt;
        auto lane = std::move(pending_);
        pending_ = reader_.next();
        return lane;
    }

    void finish(std::optional<FrameIndex> last_detection_frame) const {
        if (pending_) {
            throw PipelineError("lane file frame " + std::to_string(pending_->source_frame) +
                                " has no matching detection frame (last detection frame " +
                                (last_detection_frame ? std::to_string(*last_detection_frame)
                                                      : std::string("none")) +
                                ")");
        }
    }

private:
    LaneFileReader reader_;
    std::optional<LaneModel> pending_;
};

}  // namespace

std::size_t run_pipeline(std::istream& detections, const LaneSource& lanes,
                         const PipelineConfig& cfg, std::ostream& alert_log) {
    AlertEngine engine(cfg);
    DetectionStreamReader reader(detections);
    std::optional<LaneFileCursor> cursor;
    if (const auto* lf = std::get_if<LaneFileSource>(&lanes)) {
        if (lf->in == nullptr) throw PipelineError("lane file stream is null");
        cursor.emplace(*lf->in);
    }
    const auto* frames_dir = std::get_if<FramesDirSource>(&lanes);

    std::optional<std::string> video_id;
    std::optional<FrameIndex> last_frame;
    std::size_t processed = 0;
    bool sized = false;
    while (auto frame = reader.next()) {
        if (video_id && *video_id != frame->video_id) {
            throw PipelineError("detection stream mixes videos '" + *video_id + "' and '" +
                                frame->video_id + "'; run one video per pipeline");
        }
        video_id = frame->video_id;

        std::optional<LaneModel> lane;
        if (cursor) {
            lane = cursor->take(frame->frame_index);
        } else {
            auto path = find_frame_image(frames_dir->dir, frame->video_id, frame->frame_index);
            if (!path) {
                throw PipelineError("missing frame image for frame " +
                                    std::to_string(frame->frame_index) + " in " +
                                    frames_dir->dir.string());
            }
            const GrayImage image = read_pnm(*path);
            if (!sized) {
                engine.set_frame_size(image.width, image.height);
                sized = true;
            }
            lane = detect_lane(image, cfg.lane, frame->frame_index);
        }
        alert_log << serialize_decision(engine.step(*frame, lane)) << '\n';
        last_frame = frame->frame_index;
        ++processed;
    }
    if (cursor) cursor->finish(last_frame);
    return processed;
}

}  // namespace animalguard
