#include "animalguard/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace animalguard {

double TrackerConfig::default_match_distance(int width, int height) {
    return 0.25 * std::hypot(static_cast<double>(width), static_cast<double>(height));
}

namespace {

struct Candidate {
    double distance;
    TrackId track_id;
    std::size_t track_pos;
    std::size_t det;
};

void push_history(TrackState& t, FrameIndex frame, std::size_t capacity) {
    t.history.push_back({frame, t.centroid});
    while (t.history.size() > capacity) t.history.pop_front();
}

}  // namespace

std::optional<TrackId> FrameAssignments::track_for_detection(std::size_t det) const {
    for (const auto* list : {&matches, &registered})
        for (const auto& [id, d] : *list)
            if (d == det) return id;
    return std::nullopt;
}

TrackerUpdate tracker_update(const TrackerState& state, const FrameDetections& frame,
                             const TrackerConfig& cfg) {
    TrackerUpdate out;
    out.state = state;
    auto& tracks = out.state.tracks;
    const auto& dets = frame.detections;

    std::vector<Point2> centroids;
    centroids.reserve(dets.size());
    for (const auto& d : dets) centroids.push_back(centroid(d.box));

    std::vector<Candidate> candidates;
    candidates.reserve(tracks.size() * dets.size());
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
        for (std::size_t di = 0; di < dets.size(); ++di) {
            const double dist = distance(tracks[ti].centroid, centroids[di]);
            if (cfg.max_match_distance && dist > *cfg.max_match_distance) continue;
            candidates.push_back({dist, tracks[ti].id, ti, di});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.distance, a.track_id, a.det) < std::tie(b.distance, b.track_id, b.det);
    });

    std::vector<bool> track_used(tracks.size(), false);
    std::vector<bool> det_used(dets.size(), false);
    for (const auto& c : candidates) {
        if (track_used[c.track_pos] || det_used[c.det]) continue;
        track_used[c.track_pos] = true;
        det_used[c.det] = true;
        TrackState& t = tracks[c.track_pos];
        t.centroid = centroids[c.det];
        t.box = dets[c.det].box;
        t.class_name = dets[c.det].class_name;
        t.disappeared = 0;
        push_history(t, frame.frame_index, cfg.history_len);
        out.assignments.matches.emplace_back(t.id, c.det);
    }
    std::sort(out.assignments.matches.begin(), out.assignments.matches.end());

    std::vector<TrackState> kept;
    kept.reserve(tracks.size() + dets.size());
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
        TrackState& t = tracks[ti];
        if (!track_used[ti] && ++t.disappeared > cfg.max_disappeared) {
            out.assignments.deregistered.push_back(t.id);
            continue;
        }
        kept.push_back(std::move(t));
    }

    for (std::size_t di = 0; di < dets.size(); ++di) {
        if (det_used[di]) continue;
        TrackState t;
        t.id = out.state.next_id++;
        t.class_name = dets[di].class_name;
        t.centroid = centroids[di];
        t.box = dets[di].box;
        push_history(t, frame.frame_index, cfg.history_len);
        out.assignments.registered.emplace_back(t.id, di);
        kept.push_back(std::move(t));
    }
    tracks = std::move(kept);
    return out;
}

TrackState update_track_direction(TrackState track, double min_magnitude, int direction_ttl,
                                  FrameIndex current_frame) {
    const bool fresh_history =
        !track.history.empty() && track.history.back().frame_index == current_frame;
    if (fresh_history) {
        const std::vector<HistoryEntry> window(track.history.begin(), track.history.end());
        if (auto est = compute_direction(window, min_magnitude)) {
            track.last_direction = est;
            return track;
        }
    }
    if (track.last_direction && current_frame - track.last_direction->at_frame >= direction_ttl)
        track.last_direction.reset();
    return track;
}

}  // namespace animalguard
