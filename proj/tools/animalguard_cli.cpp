// animalguard: command-line front end for the alert engine, lane detector,
// evaluation harness and scenario simulator.
//
// Exit codes: 0 success, 1 validation failure, 2 runtime error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include "animalguard/detection_io.hpp"
#include "animalguard/evaluation.hpp"
#include "animalguard/lane_detector.hpp"
#include "animalguard/pipeline.hpp"
#include "animalguard/scenario_sim.hpp"

namespace fs = std::filesystem;
using namespace animalguard;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return in;
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

std::string slurp(const fs::path& p) {
    auto in = open_in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_run(const fs::path& detections, const std::optional<fs::path>& frames,
            const std::optional<fs::path>& lanes, const fs::path& out_path,
            const std::optional<fs::path>& config) {
    const PipelineConfig cfg = config ? load_config(*config) : PipelineConfig{};
    auto det_in = open_in(detections);
    auto out = open_out(out_path);
    if (lanes) {
        auto lane_in = open_in(*lanes);
        run_pipeline(det_in, LaneFileSource{&lane_in}, cfg, out);
    } else {
        run_pipeline(det_in, FramesDirSource{*frames}, cfg, out);
    }
    return 0;
}

int cmd_lanes(const fs::path& frames_dir, const fs::path& out_path,
              const std::optional<std::string>& video, const std::optional<fs::path>& config) {
    const PipelineConfig cfg = config ? load_config(*config) : PipelineConfig{};
    static const std::regex name_re(R"((.+)_(\d{6,})\.(pgm|ppm))");
    std::map<std::string, std::map<FrameIndex, fs::path>> found;
    for (const auto& entry : fs::directory_iterator(frames_dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (!entry.is_regular_file() || !std::regex_match(name, m, name_re)) continue;
        if (video && m[1].str() != *video) continue;
        found[m[1].str()].emplace(std::stoll(m[2].str()), entry.path());
    }
    if (found.empty()) throw std::runtime_error("no frame images found in " + frames_dir.string());
    if (found.size() > 1)
        throw std::runtime_error("frames of several videos found; choose one with --video");

    auto out = open_out(out_path);
    for (const auto& [idx, path] : found.begin()->second) {
        if (auto lane = detect_lane(read_pnm(path), cfg.lane, idx)) out << serialize_lane(*lane) << '\n';
    }
    return 0;
}

int cmd_eval_det(const fs::path& pred, const fs::path& truth, double iou_threshold,
                 const fs::path& report) {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
        throw ConfigError("--iou must be in (0,1)");
    auto pin = open_in(pred);
    const auto preds = parse_detection_stream(pin);
    auto tin = open_in(truth);
    const auto gt = parse_ground_truth(tin);
    const auto classes = evaluate_detections(preds, gt, iou_threshold);
    open_out(report) << serialize_detection_report(classes, iou_threshold) << '\n';
    return 0;
}

int cmd_eval_alerts(const fs::path& alerts, const fs::path& truth, int window, int horizon,
                    const std::string& far_mode, const fs::path& report) {
    AlertEvalParams params;
    params.warning_window = window;
    params.horizon = horizon;
    if (far_mode == "episodes") {
        params.far_denominator = FarDenominator::Episodes;
    } else if (far_mode != "decisions") {
        throw ConfigError("--far-denominator must be 'decisions' or 'episodes'");
    }
    auto ain = open_in(alerts);
    const auto log = parse_alert_log(ain);
    auto tin = open_in(truth);
    const auto gt = parse_ground_truth(tin);
    open_out(report) << serialize_alert_report(evaluate_alerts(log, gt, params), params) << '\n';
    return 0;
}

int cmd_simulate(const std::optional<fs::path>& spec_path, const std::optional<std::string>& kind,
                 std::uint64_t seed, const fs::path& out_dir, bool frames) {
    ScenarioSpec spec;
    if (spec_path) {
        spec = parse_scenario_spec(slurp(*spec_path));
    } else {
        auto k = scenario_kind_from_string(*kind);
        if (!k) throw SpecError("unknown scenario kind '" + *kind + "'");
        spec = sample_scenario(*k, seed);
    }
    const auto outputs = generate(spec);
    write_scenario(spec, outputs, out_dir, frames);
    open_out(out_dir / "spec.json") << serialize_scenario_spec(spec) << '\n';
    return 0;
}

int cmd_validate(const fs::path& detections) {
    auto in = open_in(detections);
    DetectionStreamReader reader(in);
    std::size_t frames = 0;
    while (reader.next()) ++frames;
    std::cout << "ok: " << frames << " frames\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Animal collision-avoidance alert engine"};
    app.require_subcommand(1);

    fs::path detections, out, truth, report, alerts, frames_dir;
    std::optional<fs::path> frames_opt, lanes_opt, config_opt, spec_opt;
    std::optional<std::string> video_opt, kind_opt;
    double iou_threshold = 0.5;
    int window = 90, horizon = 90;
    std::string far_mode = "decisions";
    std::uint64_t seed = 0;
    bool render_frames = false;

    auto* run = app.add_subcommand("run", "Run the alert pipeline over a detection stream");
    run->add_option("--detections", detections, "Detection stream (JSON lines)")->required();
    auto* run_frames = run->add_option("--frames", frames_opt, "Directory of frame images");
    auto* run_lanes = run->add_option("--lanes", lanes_opt, "Precomputed lane file");
    run_frames->excludes(run_lanes);
    run->add_option("--out", out, "Alert log output")->required();
    run->add_option("--config", config_opt, "Flat key = value config file");

    auto* lanes = app.add_subcommand("lanes", "Detect lanes in a directory of frames");
    lanes->add_option("--frames", frames_dir)->required();
    lanes->add_option("--out", out)->required();
    lanes->add_option("--video", video_opt, "Restrict to one video id");
    lanes->add_option("--config", config_opt);

    auto* eval_det = app.add_subcommand("eval-det", "Detection precision/recall/AP");
    eval_det->add_option("--pred", detections)->required();
    eval_det->add_option("--truth", truth)->required();
    eval_det->add_option("--iou", iou_threshold)->capture_default_str();
    eval_det->add_option("--report", report)->required();

    auto* eval_alerts = app.add_subcommand("eval-alerts", "Alert-level PADR/FAR");
    eval_alerts->add_option("--alerts", alerts)->required();
    eval_alerts->add_option("--truth", truth)->required();
    eval_alerts->add_option("--window", window)->capture_default_str();
    eval_alerts->add_option("--horizon", horizon)->capture_default_str();
    eval_alerts->add_option("--far-denominator", far_mode, "decisions | episodes")->capture_default_str();
    eval_alerts->add_option("--report", report)->required();

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario");
    auto* sim_spec = simulate->add_option("--spec", spec_opt, "Scenario spec (JSON)");
    auto* sim_kind = simulate->add_option("--kind", kind_opt, "Sample a scenario of this kind");
    sim_spec->excludes(sim_kind);
    simulate->add_option("--seed", seed, "Seed for --kind sampling")->capture_default_str();
    simulate->add_option("--out", out)->required();
    simulate->add_flag("--frames", render_frames, "Also render frames/*.pgm");

    auto* validate = app.add_subcommand("validate", "Schema-check a detection stream");
    validate->add_option("--detections", detections)->required();

    auto* config_dump = app.add_subcommand("config-dump", "Print every config key with its value");
    config_dump->add_option("--config", config_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitRuntime;
    }

    try {
        if (run->parsed()) {
            if (!frames_opt && !lanes_opt) throw CLI::RequiredError("--frames or --lanes");
            return cmd_run(detections, frames_opt, lanes_opt, out, config_opt);
        }
        if (lanes->parsed()) return cmd_lanes(frames_dir, out, video_opt, config_opt);
        if (eval_det->parsed()) return cmd_eval_det(detections, truth, iou_threshold, report);
        if (eval_alerts->parsed())
            return cmd_eval_alerts(alerts, truth, window, horizon, far_mode, report);
        if (simulate->parsed()) {
            if (!spec_opt && !kind_opt) throw CLI::RequiredError("--spec or --kind");
            return cmd_simulate(spec_opt, kind_opt, seed, out, render_frames);
        }
        if (validate->parsed()) return cmd_validate(detections);
        if (config_dump->parsed()) {
            std::cout << dump_config(config_opt ? load_config(*config_opt) : PipelineConfig{});
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const SpecError& e) {
        std::cerr << "spec error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
