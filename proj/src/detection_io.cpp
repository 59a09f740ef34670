#include "animalguard/detection_io.hpp"

#include <istream>
#include <nlohmann/json.hpp>

#include "json_util.hpp"

namespace animalguard {

using nlohmann::json;

const std::set<std::string>& default_animal_classes() {
    static const std::set<std::string> classes{"cat", "dog",   "horse", "sheep", "cow",
                                               "elephant", "bear", "zebra", "giraffe"};
    return classes;
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

ValidationError::ValidationError(std::size_t line, std::string field, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + field + ": " + what),
      line_(line),
      field_(std::move(field)) {}

namespace {

DetectionRecord parse_detection(const json& j, std::size_t line, const std::string& path) {
    if (!j.is_object()) throw ValidationError(line, path, "expected an object");
    DetectionRecord rec;

    const auto cls = j.find("class_name");
    if (cls == j.end() || !cls->is_string())
        throw ValidationError(line, path + ".class_name", "missing or not a string");
    rec.class_name = cls->get<std::string>();

    const auto score = j.find("score");
    if (score == j.end() || !score->is_number())
        throw ValidationError(line, path + ".score", "missing or not a number");
    rec.score = score->get<double>();
    if (!(rec.score >= 0.0 && rec.score <= 1.0))
        throw ValidationError(line, path + ".score", "outside [0,1]");

    const auto bbox = j.find("bbox");
    if (bbox == j.end()) throw ValidationError(line, path + ".bbox", "missing");
    auto box = detail::box_from_json(*bbox);
    if (!box) throw ValidationError(line, path + ".bbox", "expected [x1,y1,x2,y2]");
    if (auto bad = bbox_violation(*box)) throw ValidationError(line, path + ".bbox", *bad);
    rec.box = *box;

    if (const auto mask = j.find("mask_ref"); mask != j.end() && !mask->is_null()) {
        if (!mask->is_string()) throw ValidationError(line, path + ".mask_ref", "not a string");
        rec.mask_ref = mask->get<std::string>();
    }
    return rec;
}

}  // namespace

FrameDetections parse_frame_line(std::string_view line, std::size_t line_number) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(line_number, e.what());
    }
    if (!j.is_object()) throw ParseError(line_number, "record is not a JSON object");

    FrameDetections frame;
    const auto vid = j.find("video_id");
    if (vid == j.end() || !vid->is_string())
        throw ValidationError(line_number, "video_id", "missing or not a string");
    frame.video_id = vid->get<std::string>();

    const auto idx = j.find("frame_index");
    if (idx == j.end() || !idx->is_number_integer())
        throw ValidationError(line_number, "frame_index", "missing or not an integer");
    frame.frame_index = idx->get<FrameIndex>();
    if (frame.frame_index < 0) throw ValidationError(line_number, "frame_index", "negative");

    const auto dets = j.find("detections");
    if (dets == j.end() || !dets->is_array())
        throw ValidationError(line_number, "detections", "missing or not an array");
    frame.detections.reserve(dets->size());
    for (std::size_t i = 0; i < dets->size(); ++i) {
        frame.detections.push_back(
            parse_detection((*dets)[i], line_number, "detections[" + std::to_string(i) + "]"));
    }
    return frame;
}

std::string serialize_frame(const FrameDetections& frame) {
    nlohmann::ordered_json j;
    j["video_id"] = frame.video_id;
    j["frame_index"] = frame.frame_index;
    auto dets = nlohmann::ordered_json::array();
    for (const auto& d : frame.detections) {
        nlohmann::ordered_json dj;
        dj["class_name"] = d.class_name;
        dj["score"] = d.score;
        dj["bbox"] = {d.box.x1, d.box.y1, d.box.x2, d.box.y2};
        if (d.mask_ref) dj["mask_ref"] = *d.mask_ref;
        dets.push_back(std::move(dj));
    }
    j["detections"] = std::move(dets);
    return j.dump();
}

std::optional<FrameDetections> DetectionStreamReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_number_;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        FrameDetections frame = parse_frame_line(line, line_number_);
        auto [it, inserted] = last_index_.try_emplace(frame.video_id, frame.frame_index);
        if (!inserted) {
            if (frame.frame_index <= it->second) {
                throw ValidationError(line_number_, "frame_index",
                                      "not strictly increasing (" +
                                          std::to_string(frame.frame_index) + " after " +
                                          std::to_string(it->second) + ")");
            }
            it->second = frame.frame_index;
        }
        return frame;
    }
    return std::nullopt;
}

std::vector<FrameDetections> parse_detection_stream(std::istream& in) {
    DetectionStreamReader reader(in);
    std::vector<FrameDetections> frames;
    while (auto f = reader.next()) frames.push_back(std::move(*f));
    return frames;
}

FrameDetections filter_animals(const FrameDetections& frame, const FilterConfig& cfg) {
    FrameDetections out;
    out.video_id = frame.video_id;
    out.frame_index = frame.frame_index;
    for (const auto& d : frame.detections) {
        if (d.score >= cfg.min_score && cfg.animal_classes.contains(d.class_name)) {
            out.detections.push_back(d);
        }
    }
    return out;
}

}  // namespace animalguard
