#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "animalguard/direction.hpp"
#include "animalguard/tracker.hpp"

namespace animalguard {
namespace {

std::vector<HistoryEntry> window(Point2 first, Point2 last) {
    // Five entries; only the endpoints matter.
    return {{0, first}, {1, {first.x + 100, first.y}}, {2, {0, 0}}, {3, {7, 7}}, {4, last}};
}

TEST(ComputeDirection, ThreeFourFive) {
    const auto est = compute_direction(window({0, 0}, {3, 4}), 2.0);
    ASSERT_TRUE(est);
    EXPECT_DOUBLE_EQ(est->vector.x, 0.6);
    EXPECT_DOUBLE_EQ(est->vector.y, 0.8);
    EXPECT_DOUBLE_EQ(est->magnitude, 5.0);
    EXPECT_EQ(est->at_frame, 4);
}

TEST(ComputeDirection, StationaryIsDiscarded) {
    EXPECT_FALSE(compute_direction(window({10, 10}, {10, 10}), 0.0));
    EXPECT_FALSE(compute_direction(window({10, 10}, {10, 10}), 3.0));
}

TEST(ComputeDirection, BelowThresholdIsDiscarded) {
    EXPECT_FALSE(compute_direction(window({10, 10}, {11, 10}), 2.0));
    // Threshold is strict: magnitude must exceed it.
    EXPECT_FALSE(compute_direction(window({0, 0}, {3, 4}), 5.0));
}

TEST(ComputeDirection, NeedsFiveEntries) {
    std::vector<HistoryEntry> h{{0, {0, 0}}, {1, {5, 0}}, {2, {10, 0}}, {3, {15, 0}}};
    EXPECT_FALSE(compute_direction(h, 0.0));
    h.push_back({4, {20, 0}});
    EXPECT_TRUE(compute_direction(h, 0.0));
}

TEST(ComputeDirection, LongerHistoryUsesLastFive) {
    std::vector<HistoryEntry> h;
    for (int i = 0; i < 8; ++i) h.push_back({i, {i * i * 1.0, 0.0}});
    const auto est = compute_direction(h, 0.0);
    ASSERT_TRUE(est);
    EXPECT_DOUBLE_EQ(est->magnitude, 49.0 - 9.0);
}

TEST(ComputeDirectionProperties, UnitNormScaleAndTranslation) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-200.0, 200.0);
    std::uniform_real_distribution<double> s(0.1, 10.0);
    int materialized = 0;
    for (int i = 0; i < 2000; ++i) {
        std::vector<HistoryEntry> h;
        for (int k = 0; k < 5; ++k) h.push_back({k, {u(rng), u(rng)}});
        const double min_mag = 3.0;
        const auto est = compute_direction(h, min_mag);
        if (!est) continue;
        ++materialized;
        ASSERT_NEAR(std::hypot(est->vector.x, est->vector.y), 1.0, 1e-9);
        ASSERT_GT(est->magnitude, min_mag);

        const double scale = s(rng);
        const Point2 offset{u(rng), u(rng)};
        auto scaled = h, shifted = h;
        for (auto& e : scaled) e.centroid = {e.centroid.x * scale, e.centroid.y * scale};
        for (auto& e : shifted) e.centroid = {e.centroid.x + offset.x, e.centroid.y + offset.y};

        if (auto es = compute_direction(scaled, min_mag)) {
            ASSERT_NEAR(es->magnitude, est->magnitude * scale, 1e-9 * est->magnitude * scale);
            ASSERT_NEAR(es->vector.x, est->vector.x, 1e-9);
            ASSERT_NEAR(es->vector.y, est->vector.y, 1e-9);
        }
        const auto et = compute_direction(shifted, min_mag);
        ASSERT_TRUE(et);
        ASSERT_NEAR(et->magnitude, est->magnitude, 1e-9);
        ASSERT_NEAR(et->vector.x, est->vector.x, 1e-9);
        ASSERT_NEAR(et->vector.y, est->vector.y, 1e-9);
    }
    EXPECT_GT(materialized, 1000);
}

TrackState moving_track(FrameIndex last_frame, double step) {
    TrackState t;
    t.id = 3;
    for (FrameIndex f = last_frame - 4; f <= last_frame; ++f)
        t.history.push_back({f, {step * static_cast<double>(f), 0.0}});
    return t;
}

TEST(UpdateTrackDirection, FreshEstimateReplaces) {
    const auto t = update_track_direction(moving_track(20, 3.0), 5.0, 10, 20);
    ASSERT_TRUE(t.last_direction);
    EXPECT_EQ(t.last_direction->at_frame, 20);
    EXPECT_DOUBLE_EQ(t.last_direction->vector.x, 1.0);
}

TEST(UpdateTrackDirection, RetainedUntilTtlThenCleared) {
    TrackState t = moving_track(20, 0.0);  // static: no new estimate
    t.last_direction = DirectionEstimate{{1, 0}, 12.0, 15};
    auto kept = update_track_direction(t, 5.0, 10, 20);  // aged 5 < 10
    ASSERT_TRUE(kept.last_direction);
    EXPECT_EQ(kept.last_direction->at_frame, 15);

    auto cleared = update_track_direction(t, 5.0, 10, 25);  // aged 10 >= 10
    EXPECT_FALSE(cleared.last_direction);
}

TEST(UpdateTrackDirection, StaleHistoryGivesNoNewEstimate) {
    // Track unmatched this frame: its history ends at 20 while the frame is 23.
    TrackState t = moving_track(20, 3.0);
    t.last_direction = DirectionEstimate{{0, 1}, 9.0, 18};
    const auto out = update_track_direction(t, 5.0, 10, 23);
    ASSERT_TRUE(out.last_direction);
    EXPECT_EQ(out.last_direction->at_frame, 18);
    EXPECT_EQ(out.last_direction->vector, (Point2{0, 1}));
}

}  // namespace
}  // namespace animalguard
