#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <string_view>
#include <vector>

#include "animalguard/pipeline.hpp"

namespace animalguard {

namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct Knob {
    std::string_view key;
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, const std::string&)> set;
};

#define AG_DOUBLE(name, field)                                                        \
    Knob {                                                                            \
        name, [](const PipelineConfig& c) { return fmt_double(c.field); },            \
            [](PipelineConfig& c, const std::string& v) { c.field = to_double(name, v); } \
    }
#define AG_INT(name, field)                                                        \
    Knob {                                                                         \
        name, [](const PipelineConfig& c) { return std::to_string(c.field); },     \
            [](PipelineConfig& c, const std::string& v) { c.field = to_int(name, v); } \
    }

const std::vector<Knob>& knobs() {
    static const std::vector<Knob> table{
        Knob{"animal_classes",
             [](const PipelineConfig& c) {
                 std::string out;
                 for (const auto& cls : c.filter.animal_classes) out += (out.empty() ? "" : ",") + cls;
                 return out;
             },
             [](PipelineConfig& c, const std::string& v) {
                 c.filter.animal_classes.clear();
                 std::stringstream ss(v);
                 std::string item;
                 while (std::getline(ss, item, ',')) {
                     const auto b = item.find_first_not_of(' ');
                     const auto e = item.find_last_not_of(' ');
                     if (b != std::string::npos) c.filter.animal_classes.insert(item.substr(b, e - b + 1));
                 }
             }},
        AG_DOUBLE("min_score", filter.min_score),
        AG_INT("max_disappeared", tracker.max_disappeared),
        Knob{"max_match_distance",
             [](const PipelineConfig& c) {
                 if (c.tracker.max_match_distance) return fmt_double(*c.tracker.max_match_distance);
                 return std::string(c.auto_match_distance ? "auto" : "none");
             },
             [](PipelineConfig& c, const std::string& v) {
                 c.tracker.max_match_distance.reset();
                 if (v == "auto") {
                     c.auto_match_distance = true;
                 } else if (v == "none") {
                     c.auto_match_distance = false;
                 } else {
                     c.auto_match_distance = false;
                     c.tracker.max_match_distance = to_double("max_match_distance", v);
                 }
             }},
        Knob{"history_len",
             [](const PipelineConfig& c) { return std::to_string(c.tracker.history_len); },
             [](PipelineConfig& c, const std::string& v) {
                 const int n = to_int("history_len", v);
                 if (n < 0) throw ConfigError("history_len: must be nonnegative");
                 c.tracker.history_len = static_cast<std::size_t>(n);
             }},
        AG_INT("frame_width", frame_width),
        AG_INT("frame_height", frame_height),
        AG_INT("blur_kernel", lane.blur_kernel),
        AG_DOUBLE("blur_sigma", lane.blur_sigma),
        AG_DOUBLE("canny_low", lane.canny_low),
        AG_DOUBLE("canny_high", lane.canny_high),
        AG_DOUBLE("roi_bottom_left", lane.roi_bottom_left),
        AG_DOUBLE("roi_bottom_right", lane.roi_bottom_right),
        AG_DOUBLE("roi_top_left", lane.roi_top_left),
        AG_DOUBLE("roi_top_right", lane.roi_top_right),
        AG_DOUBLE("roi_top", lane.roi_top),
        AG_DOUBLE("hough_rho", lane.hough_rho),
        AG_DOUBLE("hough_theta_deg", lane.hough_theta_deg),
        AG_INT("hough_threshold", lane.hough_threshold),
        AG_DOUBLE("min_line_length", lane.min_line_length),
        AG_DOUBLE("max_line_gap", lane.max_line_gap),
        AG_DOUBLE("min_abs_slope", lane.min_abs_slope),
        AG_DOUBLE("horizon_frac", lane.horizon_frac),
        AG_INT("hold_limit", hold_limit),
        AG_DOUBLE("min_magnitude", min_magnitude),
        AG_INT("direction_ttl", direction_ttl),
        AG_DOUBLE("toward_min_component", decision.toward_min_component),
    };
    return table;
}

#undef AG_DOUBLE
#undef AG_INT

}  // namespace

void validate_config(const PipelineConfig& c) {
    if (c.filter.animal_classes.empty()) throw ConfigError("animal_classes must not be empty");
    if (!(c.filter.min_score >= 0.0 && c.filter.min_score <= 1.0))
        throw ConfigError("min_score must be in [0,1]");
    if (c.tracker.max_disappeared < 1) throw ConfigError("max_disappeared must be >= 1");
    if (c.tracker.history_len < kDirectionWindow)
        throw ConfigError("history_len must be >= " + std::to_string(kDirectionWindow));
    if (c.tracker.max_match_distance && !(*c.tracker.max_match_distance > 0.0))
        throw ConfigError("max_match_distance must be positive");
    if (c.hold_limit < 0) throw ConfigError("hold_limit must be >= 0");
    if (c.direction_ttl < 0) throw ConfigError("direction_ttl must be >= 0");
    if (!(c.min_magnitude >= 0.0)) throw ConfigError("min_magnitude must be >= 0");
    if (c.lane.blur_kernel < 1 || c.lane.blur_kernel % 2 == 0)
        throw ConfigError("blur_kernel must be odd and >= 1");
    if (!(c.lane.canny_low >= 0.0 && c.lane.canny_low <= c.lane.canny_high))
        throw ConfigError("canny thresholds must satisfy 0 <= canny_low <= canny_high");
    if (!(c.lane.hough_rho > 0.0) || !(c.lane.hough_theta_deg > 0.0) || c.lane.hough_threshold < 1)
        throw ConfigError("hough_rho, hough_theta_deg and hough_threshold must be positive");
    if (c.frame_width < 0 || c.frame_height < 0) throw ConfigError("frame size must be >= 0");
    if (!(c.lane.horizon_frac > 0.0 && c.lane.horizon_frac < 1.0))
        throw ConfigError("horizon_frac must be in (0,1)");
}

PipelineConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(e.what());
    }
    PipelineConfig cfg;
    for (const auto& [key, node] : tree) {
        if (!node.empty()) throw ConfigError("sections are not supported: [" + key + "]");
        const auto& table = knobs();
        const auto it = std::find_if(table.begin(), table.end(),
                                     [&](const Knob& k) { return k.key == key; });
        if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
        it->set(cfg, node.data());
    }
    validate_config(cfg);
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in);
}

std::string dump_config(const PipelineConfig& cfg) {
    std::ostringstream os;
    for (const auto& k : knobs()) os << k.key << " = " << k.get(cfg) << '\n';
    return os.str();
}

}  // namespace animalguard
