#include "animalguard/evaluation.hpp"

#include <algorithm>
#include <istream>
#include <iterator>
#include <map>
#include <set>
#include <nlohmann/json.hpp>
#include <tuple>

#include "json_util.hpp"

namespace animalguard {

FrameMatch match_frame(std::span<const DetectionRecord> preds,
                       std::span<const GroundTruthBox> gts, double iou_threshold) {
    struct Pair {
        double iou;
        std::size_t p;
        std::size_t g;
    };
    std::vector<Pair> pairs;
    for (std::size_t p = 0; p < preds.size(); ++p) {
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (preds[p].class_name != gts[g].class_name) continue;
            const double v = iou(preds[p].box, gts[g].box);
            if (v >= iou_threshold) pairs.push_back({v, p, g});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        return std::tie(a.p, a.g) < std::tie(b.p, b.g);
    });

    FrameMatch out;
    std::vector<bool> p_used(preds.size(), false);
    std::vector<bool> g_used(gts.size(), false);
    for (const auto& c : pairs) {
        if (p_used[c.p] || g_used[c.g]) continue;
        p_used[c.p] = g_used[c.g] = true;
        out.pairs.emplace_back(c.p, c.g);
    }
    const auto tp = static_cast<std::int64_t>(out.pairs.size());
    out.counts = {tp, static_cast<std::int64_t>(preds.size()) - tp,
                  static_cast<std::int64_t>(gts.size()) - tp};
    return out;
}

PrecisionRecall precision_recall(const ConfusionCounts& c) {
    PrecisionRecall pr;
    if (c.tp + c.fp > 0) pr.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) pr.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return pr;
}

PRCurve build_pr_curve(std::span<const EvalFrame> frames, double iou_threshold) {
    std::size_t total_gt = 0;
    for (const auto& f : frames) total_gt += f.truths.size();
    if (total_gt == 0) throw EvaluationError("no ground-truth boxes: recall is undefined");

    struct Ranked {
        double score;
        std::size_t frame;
        std::size_t det;
    };
    std::vector<Ranked> ranked;
    for (std::size_t fi = 0; fi < frames.size(); ++fi)
        for (std::size_t di = 0; di < frames[fi].predictions.size(); ++di)
            ranked.push_back({frames[fi].predictions[di].score, fi, di});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

    std::vector<std::vector<bool>> used(frames.size());
    for (std::size_t fi = 0; fi < frames.size(); ++fi) used[fi].assign(frames[fi].truths.size(), false);

    PRCurve curve;
    std::size_t tp = 0;
    for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
        const auto& r = ranked[rank];
        const auto& pred = frames[r.frame].predictions[r.det];
        const auto& truths = frames[r.frame].truths;
        std::optional<std::size_t> best;
        double best_iou = 0.0;
        for (std::size_t g = 0; g < truths.size(); ++g) {
            if (used[r.frame][g] || truths[g].class_name != pred.class_name) continue;
            const double v = iou(pred.box, truths[g].box);
            if (v >= iou_threshold && (!best || v > best_iou)) {
                best = g;
                best_iou = v;
            }
        }
        if (best) {
            used[r.frame][*best] = true;
            ++tp;
        }
        curve.points.push_back({static_cast<double>(tp) / static_cast<double>(total_gt),
                                static_cast<double>(tp) / static_cast<double>(rank + 1)});
    }
    return curve;
}

PRCurve interpolate(const PRCurve& curve) {
    PRCurve out = curve;
    double running = 0.0;
    for (auto it = out.points.rbegin(); it != out.points.rend(); ++it) {
        running = std::max(running, it->precision);
        it->precision = running;
    }
    out.interpolated = true;
    return out;
}

double average_precision(const PRCurve& curve) {
    const PRCurve interp = curve.interpolated ? curve : interpolate(curve);
    double ap = 0.0;
    double prev_recall = 0.0;
    for (const auto& pt : interp.points) {
        ap += (pt.recall - prev_recall) * pt.precision;
        prev_recall = pt.recall;
    }
    return ap;
}

// --- ground truth file ------------------------------------------------------

namespace {

using nlohmann::json;

[[noreturn]] void gt_error(const std::string& field, const std::string& what) {
    throw ValidationError(1, field, what);
}

FrameIndex read_frame_index(const json& j, const std::string& path) {
    const auto it = j.find("frame_index");
    if (it == j.end() || !it->is_number_integer() || it->get<FrameIndex>() < 0)
        gt_error(path + ".frame_index", "missing or not a nonnegative integer");
    return it->get<FrameIndex>();
}

BBox read_box(const json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    auto box = it == j.end() ? std::nullopt : detail::box_from_json(*it);
    if (!box) gt_error(path + "." + key, "expected [x1,y1,x2,y2]");
    if (auto bad = bbox_violation(*box)) gt_error(path + "." + key, *bad);
    return *box;
}

std::optional<std::int64_t> read_object_id(const json& j) {
    const auto it = j.find("object_id");
    if (it == j.end() || !it->is_number_integer()) return std::nullopt;
    return it->get<std::int64_t>();
}

}  // namespace

GroundTruth parse_ground_truth(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(1, e.what());
    }
    if (!j.is_object()) throw ParseError(1, "ground truth is not a JSON object");

    GroundTruth gt;
    const auto vid = j.find("video_id");
    if (vid == j.end() || !vid->is_string()) gt_error("video_id", "missing or not a string");
    gt.video_id = vid->get<std::string>();
    if (const auto g = j.find("generator"); g != j.end() && g->is_string())
        gt.generator = g->get<std::string>();

    const auto frames = j.find("frames");
    if (frames == j.end() || !frames->is_array()) gt_error("frames", "missing or not an array");
    for (std::size_t i = 0; i < frames->size(); ++i) {
        const auto& fj = (*frames)[i];
        const std::string path = "frames[" + std::to_string(i) + "]";
        if (!fj.is_object()) gt_error(path, "expected an object");
        GroundTruthFrame f;
        f.frame_index = read_frame_index(fj, path);
        const auto boxes = fj.find("boxes");
        if (boxes == fj.end() || !boxes->is_array()) gt_error(path + ".boxes", "missing or not an array");
        for (std::size_t b = 0; b < boxes->size(); ++b) {
            const auto& bj = (*boxes)[b];
            const std::string bpath = path + ".boxes[" + std::to_string(b) + "]";
            if (!bj.is_object()) gt_error(bpath, "expected an object");
            const auto cls = bj.find("class_name");
            if (cls == bj.end() || !cls->is_string()) gt_error(bpath + ".class_name", "missing");
            f.boxes.push_back({cls->get<std::string>(), read_box(bj, "bbox", bpath), read_object_id(bj)});
        }
        if (!gt.frames.empty() && f.frame_index <= gt.frames.back().frame_index)
            gt_error(path + ".frame_index", "not strictly increasing");
        gt.frames.push_back(std::move(f));
    }

    const auto events = j.find("entry_events");
    if (events == j.end() || !events->is_array()) gt_error("entry_events", "missing or not an array");
    for (std::size_t i = 0; i < events->size(); ++i) {
        const auto& ej = (*events)[i];
        const std::string path = "entry_events[" + std::to_string(i) + "]";
        if (!ej.is_object()) gt_error(path, "expected an object");
        EntryEvent e{read_frame_index(ej, path), read_box(ej, "region", path), read_object_id(ej)};
        if (!gt.frames.empty() && (e.frame_index < gt.frames.front().frame_index ||
                                   e.frame_index > gt.frames.back().frame_index))
            gt_error(path + ".frame_index", "outside the video's frame range");
        gt.entry_events.push_back(e);
    }
    return gt;
}

std::string serialize_ground_truth(const GroundTruth& gt) {
    nlohmann::ordered_json j;
    j["video_id"] = gt.video_id;
    if (gt.generator) j["generator"] = *gt.generator;
    auto frames = nlohmann::ordered_json::array();
    for (const auto& f : gt.frames) {
        nlohmann::ordered_json fj;
        fj["frame_index"] = f.frame_index;
        auto boxes = nlohmann::ordered_json::array();
        for (const auto& b : f.boxes) {
            nlohmann::ordered_json bj;
            bj["class_name"] = b.class_name;
            bj["bbox"] = detail::to_json(b.box);
            if (b.object_id) bj["object_id"] = *b.object_id;
            boxes.push_back(std::move(bj));
        }
        fj["boxes"] = std::move(boxes);
        frames.push_back(std::move(fj));
    }
    j["frames"] = std::move(frames);
    auto events = nlohmann::ordered_json::array();
    for (const auto& e : gt.entry_events) {
        nlohmann::ordered_json ej;
        ej["frame_index"] = e.frame_index;
        ej["region"] = detail::to_json(e.region);
        if (e.object_id) ej["object_id"] = *e.object_id;
        events.push_back(std::move(ej));
    }
    j["entry_events"] = std::move(events);
    return j.dump();
}

std::vector<EvalFrame> join_frames(std::span<const FrameDetections> preds, const GroundTruth& gt) {
    std::map<FrameIndex, EvalFrame> joined;
    for (const auto& p : preds) {
        auto& f = joined[p.frame_index];
        f.frame_index = p.frame_index;
        f.predictions.insert(f.predictions.end(), p.detections.begin(), p.detections.end());
    }
    for (const auto& g : gt.frames) {
        auto& f = joined[g.frame_index];
        f.frame_index = g.frame_index;
        f.truths.insert(f.truths.end(), g.boxes.begin(), g.boxes.end());
    }
    std::vector<EvalFrame> out;
    out.reserve(joined.size());
    for (auto& [idx, f] : joined) out.push_back(std::move(f));
    return out;
}

// --- alert-level evaluation -------------------------------------------------

std::vector<AlertEpisode> extract_episodes(std::span<const FrameDecision> log) {
    std::vector<AlertEpisode> done;
    // Open episodes keyed by track; the value is the log line the episode last extended on.
    std::map<TrackId, std::pair<AlertEpisode, std::size_t>> open;
    for (std::size_t line = 0; line < log.size(); ++line) {
        for (const auto& a : log[line].alerts) {
            if (a.alert_type != AlertType::StopPredicted) continue;
            auto it = open.find(a.track_id);
            if (it != open.end() && it->second.second + 1 == line) {
                it->second.first.end = a.frame_index;
                it->second.first.boxes.emplace_back(a.frame_index, a.box);
                it->second.second = line;
                continue;
            }
            if (it != open.end()) {
                done.push_back(std::move(it->second.first));
                open.erase(it);
            }
            AlertEpisode ep{a.track_id, a.frame_index, a.frame_index, {{a.frame_index, a.box}}};
            open.emplace(a.track_id, std::make_pair(std::move(ep), line));
        }
        for (auto it = open.begin(); it != open.end();) {
            if (it->second.second != line) {
                done.push_back(std::move(it->second.first));
                it = open.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (auto& [id, ep] : open) done.push_back(std::move(ep.first));
    std::sort(done.begin(), done.end(), [](const AlertEpisode& a, const AlertEpisode& b) {
        return std::tie(a.start, a.track_id) < std::tie(b.start, b.track_id);
    });
    return done;
}

AlertEvalReport evaluate_alerts(std::span<const FrameDecision> log, const GroundTruth& gt,
                                const AlertEvalParams& params) {
    AlertEvalReport report;

    auto in_window = [&](const EntryEvent& e, FrameIndex frame, const BBox& box) {
        return frame >= e.frame_index - params.warning_window && frame <= e.frame_index &&
               iou(box, e.region) >= params.region_iou;
    };

    report.total_positive_cases = static_cast<std::int64_t>(gt.entry_events.size());
    for (const auto& e : gt.entry_events) {
        bool hit = false;
        for (const auto& d : log) {
            for (const auto& a : d.alerts) {
                if (a.alert_type == AlertType::StopPredicted && in_window(e, a.frame_index, a.box)) {
                    hit = true;
                    break;
                }
            }
            if (hit) break;
        }
        if (hit) ++report.detected_cases;
    }

    const auto episodes = extract_episodes(log);
    report.episodes = static_cast<std::int64_t>(episodes.size());
    for (const auto& ep : episodes) {
        bool justified = false;
        for (const auto& e : gt.entry_events) {
            if (e.frame_index >= ep.start && e.frame_index <= ep.end + params.horizon) {
                justified = true;
                break;
            }
            for (const auto& [frame, box] : ep.boxes) {
                if (in_window(e, frame, box)) {
                    justified = true;
                    break;
                }
            }
            if (justified) break;
        }
        if (!justified) ++report.false_alarm_patterns;
    }

    report.total_patterns = report.episodes;
    if (params.far_denominator == FarDenominator::DecisionInstances)
        for (const auto& d : log) report.total_patterns += d.quiet_outside_lane;

    if (report.total_positive_cases > 0)
        report.padr = 100.0 * static_cast<double>(report.detected_cases) /
                      static_cast<double>(report.total_positive_cases);
    if (report.total_patterns > 0)
        report.far = 100.0 * static_cast<double>(report.false_alarm_patterns) /
                     static_cast<double>(report.total_patterns);
    return report;
}

std::vector<FrameDecision> parse_alert_log(std::istream& in) {
    std::vector<FrameDecision> log;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        log.push_back(parse_decision_line(line, n));
    }
    return log;
}

}  // namespace animalguard

namespace animalguard {

std::vector<ClassDetectionReport> evaluate_detections(std::span<const FrameDetections> preds,
                                                      const GroundTruth& gt,
                                                      double iou_threshold) {
    std::set<std::string> classes;
    for (const auto& f : gt.frames)
        for (const auto& b : f.boxes) classes.insert(b.class_name);

    const auto joined = join_frames(preds, gt);
    std::vector<ClassDetectionReport> out;
    for (const auto& cls : classes) {
        std::vector<EvalFrame> frames;
        frames.reserve(joined.size());
        for (const auto& f : joined) {
            EvalFrame ef{f.frame_index, {}, {}};
            for (const auto& p : f.predictions)
                if (p.class_name == cls) ef.predictions.push_back(p);
            for (const auto& t : f.truths)
                if (t.class_name == cls) ef.truths.push_back(t);
            frames.push_back(std::move(ef));
        }
        ClassDetectionReport r;
        r.class_name = cls;
        for (const auto& f : frames) r.counts += match_frame(f.predictions, f.truths, iou_threshold).counts;
        r.pr = precision_recall(r.counts);
        r.curve = build_pr_curve(frames, iou_threshold);
        r.interpolated = interpolate(r.curve);
        r.ap = average_precision(r.interpolated);
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json curve_json(const PRCurve& c) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : c.points) arr.push_back({p.recall, p.precision});
    return arr;
}

}  // namespace

std::string serialize_detection_report(std::span<const ClassDetectionReport> classes,
                                       double iou_threshold) {
    nlohmann::ordered_json j;
    j["iou_threshold"] = iou_threshold;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : classes) {
        nlohmann::ordered_json cj;
        cj["class_name"] = r.class_name;
        cj["tp"] = r.counts.tp;
        cj["fp"] = r.counts.fp;
        cj["fn"] = r.counts.fn;
        cj["precision"] = optional_number(r.pr.precision);
        cj["recall"] = optional_number(r.pr.recall);
        cj["ap"] = optional_number(r.ap);
        cj["pr_curve"] = curve_json(r.curve);
        cj["interpolated_pr_curve"] = curve_json(r.interpolated);
        arr.push_back(std::move(cj));
    }
    j["classes"] = std::move(arr);
    return j.dump(2);
}

std::string serialize_alert_report(const AlertEvalReport& r, const AlertEvalParams& params) {
    nlohmann::ordered_json j;
    j["padr"] = optional_number(r.padr);
    j["far"] = optional_number(r.far);
    j["detected_cases"] = r.detected_cases;
    j["total_positive_cases"] = r.total_positive_cases;
    j["false_alarm_patterns"] = r.false_alarm_patterns;
    j["total_patterns"] = r.total_patterns;
    j["episodes"] = r.episodes;
    j["far_denominator"] =
        params.far_denominator == FarDenominator::DecisionInstances ? "decisions" : "episodes";
    j["warning_window"] = params.warning_window;
    j["horizon"] = params.horizon;
    return j.dump(2);
}

}  // namespace animalguard
