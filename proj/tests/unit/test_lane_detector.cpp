#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "animalguard/lane_detector.hpp"
#include "animalguard/scenario_sim.hpp"

namespace animalguard {
namespace {

ScenarioSpec painted_scene() {
    ScenarioSpec spec;
    spec.left = {{120, 480}, {300, 288}};
    spec.right = {{520, 480}, {340, 288}};
    spec.animals.push_back({});
    return spec;
}

void expect_near_lines(const LaneModel& lane, const ScenarioSpec& spec, double tol) {
    // The generating equations evaluated at the model's own endpoint heights.
    EXPECT_NEAR(lane.left.bottom.x, spec.left.x_at(lane.left.bottom.y), tol);
    EXPECT_NEAR(lane.left.top.x, spec.left.x_at(lane.left.top.y), tol);
    EXPECT_NEAR(lane.right.bottom.x, spec.right.x_at(lane.right.bottom.y), tol);
    EXPECT_NEAR(lane.right.top.x, spec.right.x_at(lane.right.top.y), tol);
}

TEST(DetectLane, RecoversPaintedLines) {
    const auto spec = painted_scene();
    const auto lane = detect_lane(render_lane_frame(spec, 0), LaneParams{}, 0);
    ASSERT_TRUE(lane);
    EXPECT_DOUBLE_EQ(lane->left.bottom.y, 480.0);
    EXPECT_DOUBLE_EQ(lane->left.top.y, 288.0);
    expect_near_lines(*lane, spec, 5.0);
    EXPECT_FALSE(lane_violation(*lane));
}

TEST(DetectLane, BlackFrameHasNoLane) {
    EXPECT_FALSE(detect_lane(GrayImage(640, 480, 0), LaneParams{}));
}

TEST(DetectLane, HorizontalStripeRejectedBySlope) {
    GrayImage img(640, 480, 0);
    for (int y = 400; y < 410; ++y)
        for (int x = 0; x < 640; ++x) img.at(x, y) = 255;
    EXPECT_FALSE(detect_lane(img, LaneParams{}));
}

TEST(DetectLane, SingleSideIsAbsent) {
    auto spec = painted_scene();
    auto img = render_lane_frame(spec, 0);
    // Erase the right half.
    for (int y = 0; y < img.height; ++y)
        for (int x = 320; x < img.width; ++x) img.at(x, y) = 0;
    EXPECT_FALSE(detect_lane(img, LaneParams{}));
}

TEST(DetectLane, DeterministicAndRoiExteriorIgnored) {
    const auto spec = painted_scene();
    const auto img = render_lane_frame(spec, 0);
    const auto a = detect_lane(img, LaneParams{}, 3);
    const auto b = detect_lane(img, LaneParams{}, 3);
    ASSERT_TRUE(a && b);
    EXPECT_EQ(*a, *b);

    const auto mask = roi_mask(img.width, img.height, LaneParams{});
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> px(0, 255);
    for (int trial = 0; trial < 5; ++trial) {
        auto noisy = img;
        for (std::size_t i = 0; i < noisy.pixels.size(); ++i)
            if (mask.pixels[i] == 0) noisy.pixels[i] = static_cast<std::uint8_t>(px(rng));
        const auto c = detect_lane(noisy, LaneParams{}, 3);
        ASSERT_TRUE(c);
        EXPECT_EQ(*c, *a);
    }
}

TEST(DetectLaneProperties, ModelsAlwaysSatisfyInvariants) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto spec = sample_scenario(ScenarioKind::StaticOffLane, seed);
        if (auto lane = detect_lane(render_lane_frame(spec, 0), LaneParams{}))
            EXPECT_FALSE(lane_violation(*lane)) << seed;
    }
    // Random clutter either fails or yields a consistent model.
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> px(0, 255);
    for (int i = 0; i < 10; ++i) {
        GrayImage img(320, 240);
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>(px(rng));
        if (auto lane = detect_lane(img, LaneParams{})) EXPECT_FALSE(lane_violation(*lane));
    }
}

TEST(UpdateLaneState, Transitions) {
    const LaneModel m{{{100, 480}, {300, 288}}, {{540, 480}, {340, 288}}, 0};
    const auto fresh = update_lane_state(LaneState{}, m, 30);
    EXPECT_EQ(fresh.status, LaneStatus::Fresh);
    EXPECT_EQ(fresh.age, 0);

    const auto held = update_lane_state(fresh, std::nullopt, 30);
    EXPECT_EQ(held.status, LaneStatus::Held);
    EXPECT_EQ(held.age, 1);
    ASSERT_TRUE(held.current);
    EXPECT_EQ(*held.current, m);

    const auto unknown = update_lane_state(LaneState{m, 30, LaneStatus::Held}, std::nullopt, 30);
    EXPECT_EQ(unknown.status, LaneStatus::Unknown);
    EXPECT_FALSE(unknown.current);

    const auto zero_hold = update_lane_state(fresh, std::nullopt, 0);
    EXPECT_EQ(zero_hold.status, LaneStatus::Unknown);
}

TEST(UpdateLaneState, NeverHeldWithoutModel) {
    std::mt19937 rng(2);
    const LaneModel m{{{100, 480}, {300, 288}}, {{540, 480}, {340, 288}}, 0};
    LaneState st;
    for (int i = 0; i < 2000; ++i) {
        st = update_lane_state(st, rng() % 4 == 0 ? std::optional<LaneModel>(m) : std::nullopt, 7);
        ASSERT_EQ(st.status == LaneStatus::Unknown, !st.current.has_value());
        if (st.status == LaneStatus::Fresh) ASSERT_EQ(st.age, 0);
        ASSERT_LE(st.status == LaneStatus::Held ? st.age : 0, 7);
    }
}

TEST(LaneFile, RoundTripAndValidation) {
    const LaneModel m{{{100.5, 480}, {300, 288}}, {{540, 480}, {340.25, 288}}, 12};
    EXPECT_EQ(parse_lane_line(serialize_lane(m)), m);
    EXPECT_THROW(parse_lane_line(R"({"frame_index":1,"left":[[500,480],[300,288]],"right":[[100,480],[340,288]]})"),
                 ValidationError);
    std::istringstream in(serialize_lane(m) + "\n" + serialize_lane(m) + "\n");
    LaneFileReader reader(in);
    EXPECT_TRUE(reader.next());
    EXPECT_THROW(reader.next(), ValidationError);
}

TEST(Pnm, GrayAndRgbLuminance) {
    EXPECT_EQ(luminance(255, 255, 255), 255);
    EXPECT_EQ(luminance(0, 0, 0), 0);
    EXPECT_EQ(luminance(100, 50, 25), 62);
    EXPECT_EQ(luminance(1, 1, 0), 1);
    // 0.114 * 250 = 28.5, half rounds up
    EXPECT_EQ(luminance(0, 0, 250), 29);

    const auto dir = std::filesystem::temp_directory_path() / "animalguard_pnm_test";
    std::filesystem::create_directories(dir);
    GrayImage g(20, 16, 0);
    g.at(3, 4) = 200;
    write_pgm(dir / "a.pgm", g);
    EXPECT_EQ(read_pnm(dir / "a.pgm"), g);

    {
        std::ofstream out(dir / "b.ppm", std::ios::binary);
        out << "P6\n# comment\n16 16\n255\n";
        for (int i = 0; i < 256; ++i) out.put(char(100)).put(char(50)).put(char(25));
    }
    const auto rgb = read_pnm(dir / "b.ppm");
    EXPECT_EQ(rgb.width, 16);
    EXPECT_EQ(rgb.at(5, 5), 62);

    {
        std::ofstream out(dir / "c.pgm", std::ios::binary);
        out << "P2\n16 16\n255\n";
    }
    EXPECT_THROW(read_pnm(dir / "c.pgm"), ImageFormatError);
    std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace animalguard
