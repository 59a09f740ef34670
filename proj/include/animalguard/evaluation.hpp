#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "animalguard/decision.hpp"
#include "animalguard/detection_io.hpp"
#include "animalguard/geometry.hpp"

namespace animalguard {

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct GroundTruthBox {
    std::string class_name;
    BBox box;
    std::optional<std::int64_t> object_id;  // simulator identity, absent in hand labels
};

struct FrameMatch {
    ConfusionCounts counts;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // prediction, ground truth
};

/// Greedy descending-IoU matching of same-class pairs with IoU >= iou_threshold.
FrameMatch match_frame(std::span<const DetectionRecord> preds,
                       std::span<const GroundTruthBox> gts, double iou_threshold);

/// nullopt marks a zero denominator.
struct PrecisionRecall {
    std::optional<double> precision;
    std::optional<double> recall;
};

PrecisionRecall precision_recall(const ConfusionCounts& c);

struct PRPoint {
    double recall = 0.0;
    double precision = 0.0;
    friend bool operator==(const PRPoint&, const PRPoint&) = default;
};

struct PRCurve {
    std::vector<PRPoint> points;
    bool interpolated = false;
};

/// Predictions and ground truth of one frame, as consumed by build_pr_curve.
struct EvalFrame {
    FrameIndex frame_index = 0;
    std::vector<DetectionRecord> predictions;
    std::vector<GroundTruthBox> truths;
};

/// Sweeps predictions by descending score (ties keep input order), matching each against
/// the still-unmatched ground truth of its frame, and records cumulative (recall,
/// precision) after every rank. Throws EvaluationError when there is no ground truth.
PRCurve build_pr_curve(std::span<const EvalFrame> frames, double iou_threshold);

/// p_interp(r_i) = max over r' >= r_i of p(r').
PRCurve interpolate(const PRCurve& curve);

/// Sum of (r_{i+1} - r_i) * p_interp(r_{i+1}) with r_0 = 0 prepended.
double average_precision(const PRCurve& curve);

// --- ground truth file ------------------------------------------------------

struct EntryEvent {
    FrameIndex frame_index = 0;
    BBox region;
    std::optional<std::int64_t> object_id;
};

struct GroundTruthFrame {
    FrameIndex frame_index = 0;
    std::vector<GroundTruthBox> boxes;
};

struct GroundTruth {
    std::string video_id;
    std::vector<GroundTruthFrame> frames;
    std::vector<EntryEvent> entry_events;
    std::optional<std::string> generator;  // provenance line written by the simulator
};

GroundTruth parse_ground_truth(std::istream& in);
std::string serialize_ground_truth(const GroundTruth& gt);

/// Joins a detection stream with ground truth by frame index; frames missing on either
/// side contribute empty lists.
std::vector<EvalFrame> join_frames(std::span<const FrameDetections> preds, const GroundTruth& gt);

// --- alert-level evaluation -------------------------------------------------

enum class FarDenominator {
    DecisionInstances,  // episodes + quiet outside-lane decisions
    Episodes,
};

struct AlertEvalParams {
    int warning_window = 90;  // frames before entry in which a predictive alert counts
    int horizon = 90;         // frames after an episode in which an entry excuses it
    double region_iou = 0.3;
    FarDenominator far_denominator = FarDenominator::DecisionInstances;
};

/// A maximal run of consecutive log lines in which one track raised StopPredicted.
struct AlertEpisode {
    TrackId track_id = 0;
    FrameIndex start = 0;
    FrameIndex end = 0;
    std::vector<std::pair<FrameIndex, BBox>> boxes;
};

std::vector<AlertEpisode> extract_episodes(std::span<const FrameDecision> log);

struct AlertEvalReport {
    std::optional<double> padr;  // percent
    std::optional<double> far;   // percent
    std::int64_t detected_cases = 0;
    std::int64_t total_positive_cases = 0;
    std::int64_t false_alarm_patterns = 0;
    std::int64_t total_patterns = 0;
    std::int64_t episodes = 0;
};

AlertEvalReport evaluate_alerts(std::span<const FrameDecision> log, const GroundTruth& gt,
                                const AlertEvalParams& params = {});

std::vector<FrameDecision> parse_alert_log(std::istream& in);

// --- reports ----------------------------------------------------------------

struct ClassDetectionReport {
    std::string class_name;
    ConfusionCounts counts;
    PrecisionRecall pr;
    std::optional<double> ap;  // absent without ground truth for the class
    PRCurve curve;
    PRCurve interpolated;
};

/// Per-class counts, precision/recall and AP for every class present in the ground truth.
std::vector<ClassDetectionReport> evaluate_detections(std::span<const FrameDetections> preds,
                                                      const GroundTruth& gt,
                                                      double iou_threshold);

std::string serialize_detection_report(std::span<const ClassDetectionReport> classes,
                                       double iou_threshold);
std::string serialize_alert_report(const AlertEvalReport& report, const AlertEvalParams& params);

}  // namespace animalguard
