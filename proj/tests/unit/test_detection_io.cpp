#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "animalguard/detection_io.hpp"

namespace animalguard {
namespace {

constexpr const char* kTwoDetections =
    R"({"video_id":"v1","frame_index":7,"detections":[)"
    R"({"class_name":"cow","score":0.91,"bbox":[10,20,60,80],"mask_ref":"m/7/0"},)"
    R"({"class_name":"car","score":0.99,"bbox":[0,0,5,5]}]})";

TEST(ParseFrameLine, ValidLine) {
    const auto f = parse_frame_line(kTwoDetections);
    EXPECT_EQ(f.video_id, "v1");
    EXPECT_EQ(f.frame_index, 7);
    ASSERT_EQ(f.detections.size(), 2u);
    EXPECT_EQ(f.detections[0].class_name, "cow");
    EXPECT_EQ(f.detections[0].box, (BBox{10, 20, 60, 80}));
    EXPECT_EQ(f.detections[0].mask_ref, "m/7/0");
    EXPECT_FALSE(f.detections[1].mask_ref);
}

TEST(ParseFrameLine, MissingDetectionsNamesField) {
    try {
        parse_frame_line(R"({"video_id":"a","frame_index":3})", 4);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "detections");
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(ParseFrameLine, InvertedBox) {
    try {
        parse_frame_line(
            R"({"video_id":"a","frame_index":0,"detections":[{"class_name":"dog","score":0.5,"bbox":[10,10,5,20]}]})");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "detections[0].bbox");
        EXPECT_NE(std::string(e.what()).find("box: x2 < x1"), std::string::npos);
    }
}

TEST(ParseFrameLine, ScoreOutOfRange) {
    EXPECT_THROW(
        parse_frame_line(
            R"({"video_id":"a","frame_index":0,"detections":[{"class_name":"dog","score":1.5,"bbox":[0,0,1,1]}]})"),
        ValidationError);
}

TEST(ParseFrameLine, MalformedJsonIsParseError) {
    try {
        parse_frame_line("{not json", 12);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 12u);
    }
}

TEST(DetectionStreamReader, RejectsNonMonotoneFrameIndexPerVideo) {
    std::istringstream in(
        "{\"video_id\":\"a\",\"frame_index\":1,\"detections\":[]}\n"
        "{\"video_id\":\"b\",\"frame_index\":0,\"detections\":[]}\n"
        "\n"
        "{\"video_id\":\"a\",\"frame_index\":1,\"detections\":[]}\n");
    DetectionStreamReader reader(in);
    EXPECT_TRUE(reader.next());
    EXPECT_TRUE(reader.next());
    try {
        reader.next();
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "frame_index");
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(FilterAnimals, ClassWhitelistAndScore) {
    FrameDetections f{"v", 0,
                      {{"cow", 0.9, {0, 0, 1, 1}, {}},
                       {"car", 0.99, {0, 0, 1, 1}, {}},
                       {"dog", 0.3, {0, 0, 1, 1}, {}}}};
    const auto out = filter_animals(f, FilterConfig{});
    ASSERT_EQ(out.detections.size(), 1u);
    EXPECT_EQ(out.detections[0].class_name, "cow");
    EXPECT_EQ(out.video_id, "v");

    FilterConfig low;
    low.min_score = 0.2;
    EXPECT_EQ(filter_animals(f, low).detections.size(), 2u);
}

TEST(FilterAnimals, DefaultVocabulary) {
    const auto& classes = default_animal_classes();
    EXPECT_EQ(classes.size(), 9u);
    for (const char* c : {"cat", "dog", "horse", "sheep", "cow", "elephant", "bear", "zebra", "giraffe"})
        EXPECT_TRUE(classes.contains(c)) << c;
}

FrameDetections random_frame(std::mt19937& rng, FrameIndex idx) {
    static const char* names[] = {"cow", "dog", "car", "person", "horse"};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> n(0, 6);
    FrameDetections f{"vid", idx, {}};
    const int count = n(rng);
    for (int i = 0; i < count; ++i) {
        const double x = 500 * u(rng), y = 400 * u(rng);
        DetectionRecord d{names[n(rng) % 5], u(rng), {x, y, x + 100 * u(rng), y + 80 * u(rng)}, {}};
        if (u(rng) < 0.3) d.mask_ref = "mask_" + std::to_string(i);
        f.detections.push_back(d);
    }
    return f;
}

TEST(DetectionIoProperties, RoundTripAndFilterIdempotence) {
    std::mt19937 rng(99);
    for (int i = 0; i < 200; ++i) {
        const auto f = random_frame(rng, i);
        const auto once = parse_frame_line(serialize_frame(f));
        EXPECT_EQ(once, f);
        EXPECT_EQ(parse_frame_line(serialize_frame(once)), once);

        const FilterConfig cfg;
        const auto filtered = filter_animals(f, cfg);
        EXPECT_EQ(filter_animals(filtered, cfg), filtered);
        EXPECT_LE(filtered.detections.size(), f.detections.size());
    }
}

}  // namespace
}  // namespace animalguard
