#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "animalguard/geometry.hpp"

namespace animalguard {

using FrameIndex = std::int64_t;

struct DetectionRecord {
    std::string class_name;
    double score = 0.0;
    BBox box;
    std::optional<std::string> mask_ref;  // opaque, never decoded

    friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

struct FrameDetections {
    std::string video_id;
    FrameIndex frame_index = 0;
    std::vector<DetectionRecord> detections;

    friend bool operator==(const FrameDetections&, const FrameDetections&) = default;
};

/// The nine animal classes of the COCO vocabulary.
const std::set<std::string>& default_animal_classes();

struct FilterConfig {
    std::set<std::string> animal_classes = default_animal_classes();
    double min_score = 0.5;
};

/// Malformed line (not JSON, wrong shape). Line numbers are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Well-formed JSON that breaks a record invariant; field() names the offending field.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::size_t line, std::string field, const std::string& what);
    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

/// Parses one serialized frame record. Does not check cross-line ordering.
FrameDetections parse_frame_line(std::string_view line, std::size_t line_number = 1);

std::string serialize_frame(const FrameDetections& frame);

/// Incremental reader over a line-delimited detection stream. Blank lines are skipped.
/// Enforces strictly increasing frame_index per video_id.
class DetectionStreamReader {
public:
    explicit DetectionStreamReader(std::istream& in) : in_(in) {}

    /// Next validated frame, or nullopt at end of stream. Throws ParseError/ValidationError.
    std::optional<FrameDetections> next();

    [[nodiscard]] std::size_t line_number() const { return line_number_; }

private:
    std::istream& in_;
    std::size_t line_number_ = 0;
    std::unordered_map<std::string, FrameIndex> last_index_;
};

/// Reads a whole stream into memory; convenience for tests and batch tools.
std::vector<FrameDetections> parse_detection_stream(std::istream& in);

FrameDetections filter_animals(const FrameDetections& frame, const FilterConfig& cfg);

}  // namespace animalguard
