#include "animalguard/scenario_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "animalguard/decision.hpp"
#include "json_util.hpp"

namespace animalguard {

namespace {

constexpr std::string_view kKindNames[] = {"ENTERS_LANE", "CROSSES_AWAY", "STATIC_OFF_LANE",
                                           "IN_LANE_FROM_START", "MULTI_ANIMAL"};

constexpr double kStrokeHalfWidth = 3.0;

/// Portable jitter stream; the sequence is fixed by the seed on every platform.
class JitterSource {
public:
    explicit JitterSource(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal(double sigma) {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

std::optional<BBox> clip_to_image(const BBox& b, int w, int h) {
    BBox c{std::clamp(b.x1, 0.0, static_cast<double>(w)), std::clamp(b.y1, 0.0, static_cast<double>(h)),
           std::clamp(b.x2, 0.0, static_cast<double>(w)), std::clamp(b.y2, 0.0, static_cast<double>(h))};
    if (c.width() <= 0.0 || c.height() <= 0.0) return std::nullopt;
    return c;
}

bool visible_at(const AnimalSpec& a, FrameIndex t) {
    return t >= a.appear && (!a.vanish || t < *a.vanish);
}

void validate_spec(const ScenarioSpec& spec) {
    if (spec.frame_count < 10) throw SpecError("frame_count must be >= 10");
    if (spec.width < kMinImageSide || spec.height < kMinImageSide)
        throw SpecError("image dimensions must be >= 16");
    if (!std::isfinite(spec.jitter_sigma) || spec.jitter_sigma < 0.0)
        throw SpecError("jitter_sigma must be finite and >= 0");
    for (const auto* seg : {&spec.left, &spec.right}) {
        if (distance(seg->bottom, seg->top) == 0.0) throw SpecError("zero-length lane line");
    }
    if (auto bad = lane_violation(spec_lane(spec))) throw SpecError("invalid lane: " + *bad);
    if (spec.animals.empty()) throw SpecError("scenario needs at least one animal");
    for (const auto& a : spec.animals) {
        for (double v : {a.start.x, a.start.y, a.velocity.x, a.velocity.y})
            if (!std::isfinite(v)) throw SpecError("animal position/velocity must be finite");
        if (!(a.box_width > 0.0) || !(a.box_height > 0.0) || !std::isfinite(a.box_width) ||
            !std::isfinite(a.box_height))
            throw SpecError("animal box size must be positive");
        if (a.class_name.empty()) throw SpecError("animal class_name is empty");
    }
}

// Every animal must be strictly closer to its own previous centroid than any other
// animal's current centroid is.
void check_nearest_centroid(const std::vector<std::vector<std::optional<Point2>>>& centroids) {
    for (std::size_t t = 1; t < centroids.size(); ++t) {
        const auto& prev = centroids[t - 1];
        const auto& cur = centroids[t];
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (!prev[i] || !cur[i]) continue;
            const double own = distance(*prev[i], *cur[i]);
            for (std::size_t j = 0; j < cur.size(); ++j) {
                if (j == i || !cur[j]) continue;
                if (!(own < distance(*prev[i], *cur[j]))) {
                    throw SpecError("nearest-centroid assumption violated at frame " +
                                    std::to_string(t) + " (animals " + std::to_string(i) +
                                    ", " + std::to_string(j) + ")");
                }
            }
        }
    }
}

nlohmann::ordered_json segment_json(const LaneSegment& s) {
    return {detail::to_json(s.bottom), detail::to_json(s.top)};
}

}  // namespace

std::string_view to_string(ScenarioKind kind) { return kKindNames[static_cast<int>(kind)]; }

std::optional<ScenarioKind> scenario_kind_from_string(std::string_view s) {
    for (int i = 0; i < 5; ++i)
        if (kKindNames[i] == s) return static_cast<ScenarioKind>(i);
    return std::nullopt;
}

std::string frame_file_name(std::string_view video_id, FrameIndex frame_index, std::string_view ext) {
    std::ostringstream os;
    os << video_id << '_' << std::setw(6) << std::setfill('0') << frame_index << ext;
    return os.str();
}

BBox animal_box(const AnimalSpec& a, FrameIndex frame) {
    const double t = static_cast<double>(frame);
    const double cx = a.start.x + a.velocity.x * t;
    const double by = a.start.y + a.velocity.y * t;
    return {cx - a.box_width / 2.0, by - a.box_height, cx + a.box_width / 2.0, by};
}

LaneModel spec_lane(const ScenarioSpec& spec, FrameIndex frame) {
    return LaneModel{spec.left, spec.right, frame};
}

ScenarioOutputs generate(const ScenarioSpec& spec) {
    validate_spec(spec);

    ScenarioOutputs out;
    out.truth.video_id = spec.video_id;
    {
        std::ostringstream gen;
        gen << kJitterAlgorithm << " seed=" << spec.seed;
        out.truth.generator = gen.str();
    }

    JitterSource rng(spec.seed);
    const LaneModel lane = spec_lane(spec);
    std::vector<std::vector<std::optional<Point2>>> emitted(
        static_cast<std::size_t>(spec.frame_count),
        std::vector<std::optional<Point2>>(spec.animals.size()));
    std::vector<std::optional<bool>> was_in_lane(spec.animals.size());

    for (FrameIndex t = 0; t < spec.frame_count; ++t) {
        FrameDetections frame{spec.video_id, t, {}};
        GroundTruthFrame gt_frame{t, {}};
        for (std::size_t i = 0; i < spec.animals.size(); ++i) {
            const AnimalSpec& a = spec.animals[i];
            // Draw unconditionally so each animal's noise does not depend on visibility.
            const double jx = rng.normal(spec.jitter_sigma);
            const double jy = rng.normal(spec.jitter_sigma);
            const double score = 0.99 - 0.2 * rng.uniform();
            if (!visible_at(a, t)) {
                was_in_lane[i].reset();
                continue;
            }
            const BBox exact = animal_box(a, t);
            const auto clipped = clip_to_image(exact, spec.width, spec.height);
            const auto noisy = clip_to_image(
                BBox{exact.x1 + jx, exact.y1 + jy, exact.x2 + jx, exact.y2 + jy}, spec.width,
                spec.height);
            if (!clipped || !noisy) {
                was_in_lane[i].reset();
                continue;
            }
            frame.detections.push_back({a.class_name, score, *noisy, std::nullopt});
            gt_frame.boxes.push_back({a.class_name, *clipped, static_cast<std::int64_t>(i)});
            emitted[static_cast<std::size_t>(t)][i] = centroid(*noisy);

            const bool inside = is_in_lane(exact, lane);
            if (inside && was_in_lane[i] && !*was_in_lane[i])
                out.truth.entry_events.push_back({t, *clipped, static_cast<std::int64_t>(i)});
            was_in_lane[i] = inside;
        }
        out.frames.push_back(std::move(frame));
        out.truth.frames.push_back(std::move(gt_frame));
        out.lanes.push_back(spec_lane(spec, t));
    }

    if (spec.kind == ScenarioKind::EntersLane && out.truth.entry_events.empty())
        throw SpecError("ENTERS_LANE scenario: no animal trajectory enters the lane");
    if (spec.kind == ScenarioKind::MultiAnimal) check_nearest_centroid(emitted);

    std::ostringstream det;
    for (const auto& f : out.frames) det << serialize_frame(f) << '\n';
    out.detections_jsonl = det.str();
    std::ostringstream lanes;
    for (const auto& l : out.lanes) lanes << serialize_lane(l) << '\n';
    out.lanes_jsonl = lanes.str();
    out.truth_json = serialize_ground_truth(out.truth) + "\n";
    return out;
}

GrayImage render_lane_frame(const ScenarioSpec& spec, FrameIndex frame_index) {
    if (frame_index < 0 || frame_index >= spec.frame_count)
        throw SpecError("frame index outside the scenario");
    for (const auto* seg : {&spec.left, &spec.right})
        if (distance(seg->bottom, seg->top) == 0.0) throw SpecError("zero-length lane line");

    GrayImage img(spec.width, spec.height, 0);
    for (const auto* seg : {&spec.left, &spec.right}) {
        const double ax = seg->bottom.x, ay = seg->bottom.y;
        const double dx = seg->top.x - ax, dy = seg->top.y - ay;
        const double len2 = dx * dx + dy * dy;
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, seg->top.y) - 4)));
        const int y1 = std::min(spec.height - 1, static_cast<int>(std::ceil(std::max(ay, seg->top.y) + 4)));
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, seg->top.x) - 4)));
        const int x1 = std::min(spec.width - 1, static_cast<int>(std::ceil(std::max(ax, seg->top.x) + 4)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double s = std::clamp(((x - ax) * dx + (y - ay) * dy) / len2, 0.0, 1.0);
                const double d = std::hypot(x - (ax + s * dx), y - (ay + s * dy));
                const double coverage = std::clamp(kStrokeHalfWidth + 0.5 - d, 0.0, 1.0);
                const auto v = static_cast<std::uint8_t>(std::lround(255.0 * coverage));
                img.at(x, y) = std::max(img.at(x, y), v);
            }
        }
    }
    return img;
}

// --- spec file --------------------------------------------------------------

ScenarioSpec parse_scenario_spec(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SpecError("spec must be a JSON object");

    ScenarioSpec spec;
    try {
        auto kind = scenario_kind_from_string(j.at("kind").get<std::string>());
        if (!kind) throw SpecError("unknown scenario kind");
        spec.kind = *kind;
        spec.video_id = j.value("video_id", spec.video_id);
        spec.frame_count = j.value("frame_count", spec.frame_count);
        spec.width = j.value("width", spec.width);
        spec.height = j.value("height", spec.height);
        spec.jitter_sigma = j.value("jitter_sigma", spec.jitter_sigma);
        spec.seed = j.value("seed", spec.seed);
        if (const auto lane = j.find("lane"); lane != j.end()) {
            auto seg = [](const nlohmann::json& s) {
                auto b = detail::point_from_json(s.at(0));
                auto t = detail::point_from_json(s.at(1));
                if (!b || !t) throw SpecError("lane line must be [[x,y],[x,y]]");
                return LaneSegment{*b, *t};
            };
            spec.left = seg(lane->at("left"));
            spec.right = seg(lane->at("right"));
        }
        for (const auto& aj : j.at("animals")) {
            AnimalSpec a;
            a.class_name = aj.value("class_name", a.class_name);
            auto start = detail::point_from_json(aj.at("start"));
            auto vel = detail::point_from_json(aj.value("velocity", nlohmann::json::array({0, 0})));
            if (!start || !vel) throw SpecError("animal start/velocity must be [x,y]");
            a.start = *start;
            a.velocity = *vel;
            if (const auto size = aj.find("size"); size != aj.end()) {
                auto s = detail::point_from_json(*size);
                if (!s) throw SpecError("animal size must be [w,h]");
                a.box_width = s->x;
                a.box_height = s->y;
            }
            a.appear = aj.value("appear", FrameIndex{0});
            if (const auto v = aj.find("vanish"); v != aj.end() && !v->is_null())
                a.vanish = v->get<FrameIndex>();
            spec.animals.push_back(std::move(a));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("malformed spec: ") + e.what());
    }
    return spec;
}

std::string serialize_scenario_spec(const ScenarioSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(spec.kind);
    j["video_id"] = spec.video_id;
    j["frame_count"] = spec.frame_count;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["lane"] = {{"left", segment_json(spec.left)}, {"right", segment_json(spec.right)}};
    auto animals = nlohmann::ordered_json::array();
    for (const auto& a : spec.animals) {
        nlohmann::ordered_json aj;
        aj["class_name"] = a.class_name;
        aj["start"] = detail::to_json(a.start);
        aj["velocity"] = detail::to_json(a.velocity);
        aj["size"] = {a.box_width, a.box_height};
        aj["appear"] = a.appear;
        if (a.vanish) aj["vanish"] = *a.vanish;
        animals.push_back(std::move(aj));
    }
    j["animals"] = std::move(animals);
    j["jitter_sigma"] = spec.jitter_sigma;
    j["seed"] = spec.seed;
    return j.dump(2);
}

// --- sampling ---------------------------------------------------------------

namespace {

bool box_inside(const BBox& b, const ScenarioSpec& spec) {
    return b.x1 >= 0 && b.y1 >= 0 && b.x2 <= spec.width && b.y2 <= spec.height;
}

bool stays_inside(const AnimalSpec& a, const ScenarioSpec& spec) {
    return box_inside(animal_box(a, 0), spec) && box_inside(animal_box(a, spec.frame_count - 1), spec);
}

AnimalSpec random_animal_shape(JitterSource& rng) {
    AnimalSpec a;
    a.class_name = rng.uniform() < 0.5 ? "cow" : "dog";
    a.box_width = rng.uniform(40.0, 70.0);
    a.box_height = rng.uniform(30.0, 50.0);
    return a;
}

}  // namespace

ScenarioSpec sample_scenario(ScenarioKind kind, std::uint64_t seed) {
    // Parameter draws use a stream decorrelated from the jitter stream of the same seed.
    JitterSource rng(seed ^ 0x9E3779B97F4A7C15ULL);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        ScenarioSpec spec;
        spec.kind = kind;
        spec.seed = seed;
        spec.video_id = std::string("sim_") + std::string(to_string(kind)) + "_" + std::to_string(seed);
        spec.left.bottom.x += rng.uniform(-20.0, 20.0);
        spec.left.top.x += rng.uniform(-8.0, 8.0);
        spec.right.bottom.x += rng.uniform(-20.0, 20.0);
        spec.right.top.x += rng.uniform(-8.0, 8.0);
        const bool from_left = rng.uniform() < 0.5;
        const LaneSegment& side = from_left ? spec.left : spec.right;
        const double outward = from_left ? -1.0 : 1.0;  // direction away from the lane center

        switch (kind) {
            case ScenarioKind::EntersLane: {
                AnimalSpec a = random_animal_shape(rng);
                const double y = rng.uniform(300.0, 350.0);
                const double band = std::abs(side.x_at(y) - side.mid_x());
                const double lead = rng.uniform(20.0, 60.0);
                const double speed = rng.uniform(2.0, 3.5);
                a.start = {side.x_at(y) + outward * (band + lead), y};
                a.velocity = {-outward * speed, rng.uniform(-0.3, 0.3)};
                spec.frame_count =
                    static_cast<int>(std::ceil((band + lead) / speed)) + static_cast<int>(rng.uniform(20.0, 40.0));
                spec.animals.push_back(a);
                break;
            }
            case ScenarioKind::CrossesAway: {
                AnimalSpec a = random_animal_shape(rng);
                const double y = rng.uniform(300.0, 460.0);
                a.start = {side.x_at(y) + outward * rng.uniform(5.0, 40.0), y};
                a.velocity = {outward * rng.uniform(2.0, 3.5), rng.uniform(-0.3, 0.3)};
                spec.frame_count = static_cast<int>(rng.uniform(40.0, 80.0));
                spec.animals.push_back(a);
                break;
            }
            case ScenarioKind::StaticOffLane: {
                AnimalSpec a = random_animal_shape(rng);
                const double y = rng.uniform(300.0, 470.0);
                a.start = {side.x_at(y) + outward * rng.uniform(10.0, 150.0), y};
                spec.frame_count = static_cast<int>(rng.uniform(60.0, 120.0));
                spec.animals.push_back(a);
                break;
            }
            case ScenarioKind::InLaneFromStart: {
                AnimalSpec a = random_animal_shape(rng);
                const double y = rng.uniform(320.0, 470.0);
                a.start = {rng.uniform(spec.left.x_at(y) + 10.0, spec.right.x_at(y) - 10.0), y};
                a.velocity = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
                spec.frame_count = 60;
                spec.animals.push_back(a);
                break;
            }
            case ScenarioKind::MultiAnimal: {
                const int n = 2 + static_cast<int>(rng.uniform() * 3.0);
                spec.frame_count = static_cast<int>(rng.uniform(60.0, 120.0));
                for (int i = 0; i < n; ++i) {
                    AnimalSpec a = random_animal_shape(rng);
                    a.start = {rng.uniform(40.0, 600.0), rng.uniform(150.0, 470.0)};
                    const double speed = rng.uniform(0.0, 3.5);
                    const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
                    a.velocity = {speed * std::cos(heading), speed * std::sin(heading)};
                    spec.animals.push_back(a);
                }
                break;
            }
        }

        bool ok = true;
        for (const auto& a : spec.animals) ok = ok && stays_inside(a, spec);
        if (!ok) continue;
        try {
            generate(spec);
        } catch (const SpecError&) {
            continue;
        }
        return spec;
    }
    throw SpecError("could not sample a valid scenario");
}

void write_scenario(const ScenarioSpec& spec, const ScenarioOutputs& outputs,
                    const std::filesystem::path& dir, bool render_frames) {
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const std::string& body) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        f << body;
    };
    write("detections.jsonl", outputs.detections_jsonl);
    write("lanes.jsonl", outputs.lanes_jsonl);
    write("truth.json", outputs.truth_json);
    if (render_frames) {
        const auto frames_dir = dir / "frames";
        std::filesystem::create_directories(frames_dir);
        for (FrameIndex t = 0; t < spec.frame_count; ++t)
            write_pgm(frames_dir / frame_file_name(spec.video_id, t), render_lane_frame(spec, t));
    }
}

}  // namespace animalguard
