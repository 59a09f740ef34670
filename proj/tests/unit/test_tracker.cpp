#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "animalguard/tracker.hpp"
#include "oracles.hpp"

namespace animalguard {
namespace {

DetectionRecord det_at(Point2 c, double half = 5.0) {
    return {"cow", 0.9, {c.x - half, c.y - half, c.x + half, c.y + half}, {}};
}

FrameDetections frame_of(FrameIndex idx, std::vector<Point2> centers) {
    FrameDetections f{"v", idx, {}};
    for (auto c : centers) f.detections.push_back(det_at(c));
    return f;
}

TEST(TrackerUpdate, RegistersInInputOrder) {
    const auto up = tracker_update({}, frame_of(0, {{50, 50}, {10, 10}}), {});
    ASSERT_EQ(up.state.tracks.size(), 2u);
    EXPECT_EQ(up.state.tracks[0].id, 0u);
    EXPECT_EQ(up.state.tracks[0].centroid, (Point2{50, 50}));
    EXPECT_EQ(up.state.tracks[1].id, 1u);
    EXPECT_EQ(up.assignments.registered,
              (std::vector<std::pair<TrackId, std::size_t>>{{0, 0}, {1, 1}}));
    EXPECT_TRUE(up.assignments.matches.empty());
    EXPECT_EQ(up.state.next_id, 2u);
}

TEST(TrackerUpdate, MatchesNearestCentroid) {
    const auto first = tracker_update({}, frame_of(0, {{10, 10}}), {});
    const auto second = tracker_update(first.state, frame_of(1, {{12, 11}}), {});
    ASSERT_EQ(second.assignments.matches.size(), 1u);
    EXPECT_EQ(second.assignments.matches[0], (std::pair<TrackId, std::size_t>{0, 0}));
    // Oracle: the single possible assignment costs sqrt(5).
    EXPECT_NEAR(oracle::optimal_assignment_cost({{10, 10}}, {{12, 11}}), std::sqrt(5.0), 1e-12);
    EXPECT_EQ(second.state.tracks[0].centroid, (Point2{12, 11}));
    EXPECT_EQ(second.state.tracks[0].history.size(), 2u);
}

TEST(TrackerUpdate, TwoTracksSwapOrder) {
    const auto first = tracker_update({}, frame_of(0, {{10, 10}, {100, 100}}), {});
    const auto second = tracker_update(first.state, frame_of(1, {{98, 99}, {11, 12}}), {});
    EXPECT_EQ(second.assignments.track_for_detection(1), 0u);
    EXPECT_EQ(second.assignments.track_for_detection(0), 1u);
    const double greedy = std::hypot(1, 2) + std::hypot(2, 1);
    EXPECT_NEAR(oracle::optimal_assignment_cost({{10, 10}, {100, 100}}, {{98, 99}, {11, 12}}),
                greedy, 1e-12);
}

TEST(TrackerUpdate, TieBreaksTowardLowerTrackIdThenDetection) {
    // Two tracks equidistant from one detection.
    const auto first = tracker_update({}, frame_of(0, {{0, 0}, {20, 0}}), {});
    const auto second = tracker_update(first.state, frame_of(1, {{10, 0}}), {});
    EXPECT_EQ(second.assignments.track_for_detection(0), 0u);

    // One track equidistant from two detections.
    const auto single = tracker_update({}, frame_of(0, {{10, 0}}), {});
    const auto third = tracker_update(single.state, frame_of(1, {{0, 0}, {20, 0}}), {});
    EXPECT_EQ(third.assignments.track_for_detection(0), 0u);
    EXPECT_EQ(third.assignments.track_for_detection(1), 1u);
}

TEST(TrackerUpdate, DeregistersAfterMaxDisappearedPlusOneMisses) {
    TrackerConfig cfg;
    cfg.max_disappeared = 3;
    auto up = tracker_update({}, frame_of(0, {{10, 10}}), cfg);
    for (int miss = 1; miss <= cfg.max_disappeared; ++miss) {
        up = tracker_update(up.state, frame_of(miss, {}), cfg);
        ASSERT_EQ(up.state.tracks.size(), 1u) << miss;
        EXPECT_EQ(up.state.tracks[0].disappeared, miss);
        EXPECT_TRUE(up.assignments.deregistered.empty());
    }
    up = tracker_update(up.state, frame_of(4, {}), cfg);
    EXPECT_TRUE(up.state.tracks.empty());
    EXPECT_EQ(up.assignments.deregistered, std::vector<TrackId>{0});
}

TEST(TrackerUpdate, MatchResetsDisappeared) {
    auto up = tracker_update({}, frame_of(0, {{10, 10}}), {});
    up = tracker_update(up.state, frame_of(1, {}), {});
    up = tracker_update(up.state, frame_of(2, {}), {});
    EXPECT_EQ(up.state.tracks[0].disappeared, 2);
    up = tracker_update(up.state, frame_of(3, {{11, 10}}), {});
    EXPECT_EQ(up.state.tracks[0].disappeared, 0);
}

TEST(TrackerUpdate, MatchGateRegistersFarDetection) {
    TrackerConfig cfg;
    cfg.max_match_distance = 20.0;
    auto up = tracker_update({}, frame_of(0, {{10, 10}}), cfg);
    up = tracker_update(up.state, frame_of(1, {{200, 10}}), cfg);
    EXPECT_TRUE(up.assignments.matches.empty());
    ASSERT_EQ(up.assignments.registered.size(), 1u);
    EXPECT_EQ(up.assignments.registered[0].first, 1u);
    EXPECT_EQ(up.state.tracks.size(), 2u);
}

TEST(TrackerUpdate, IdsNeverRecycle) {
    TrackerConfig cfg;
    cfg.max_disappeared = 1;
    auto up = tracker_update({}, frame_of(0, {{10, 10}}), cfg);
    up = tracker_update(up.state, frame_of(1, {}), cfg);
    up = tracker_update(up.state, frame_of(2, {}), cfg);
    ASSERT_TRUE(up.state.tracks.empty());
    up = tracker_update(up.state, frame_of(3, {{10, 10}}), cfg);
    EXPECT_EQ(up.state.tracks[0].id, 1u);
}

TEST(TrackerUpdate, HistoryCapacity) {
    TrackerConfig cfg;
    cfg.history_len = 5;
    TrackerState st;
    for (int f = 0; f < 9; ++f) st = tracker_update(st, frame_of(f, {{10.0 + f, 10}}), cfg).state;
    const auto& h = st.tracks[0].history;
    ASSERT_EQ(h.size(), 5u);
    EXPECT_EQ(h.front().frame_index, 4);
    EXPECT_EQ(h.back().frame_index, 8);
}

TEST(TrackerUpdate, ClassFollowsDetection) {
    auto up = tracker_update({}, frame_of(0, {{10, 10}}), {});
    FrameDetections f{"v", 1, {det_at({11, 10})}};
    f.detections[0].class_name = "dog";
    up = tracker_update(up.state, f, {});
    EXPECT_EQ(up.state.tracks[0].class_name, "dog");
}

// Random small frames: greedy result is a valid one-to-one partial matching, never
// cheaper than the exhaustive optimum, and identical on replay.
TEST(TrackerProperties, GreedyIsValidPartialMatching) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 300.0);
    std::uniform_int_distribution<int> n(0, 3);
    for (int iter = 0; iter < 500; ++iter) {
        std::vector<Point2> first_c(n(rng)), second_c(n(rng));
        for (auto& p : first_c) p = {u(rng), u(rng)};
        for (auto& p : second_c) p = {u(rng), u(rng)};
        const auto a = tracker_update({}, frame_of(0, first_c), {});
        const auto b = tracker_update(a.state, frame_of(1, second_c), {});
        const auto b2 = tracker_update(a.state, frame_of(1, second_c), {});

        std::set<TrackId> seen_tracks;
        std::set<std::size_t> seen_dets;
        double cost = 0.0;
        for (const auto& [tid, d] : b.assignments.matches) {
            ASSERT_TRUE(seen_tracks.insert(tid).second);
            ASSERT_TRUE(seen_dets.insert(d).second);
            cost += distance(first_c[tid], second_c[d]);
        }
        ASSERT_EQ(b.assignments.matches.size(), std::min(first_c.size(), second_c.size()));
        ASSERT_GE(cost + 1e-9, oracle::optimal_assignment_cost(first_c, second_c));
        ASSERT_EQ(b.assignments.matches, b2.assignments.matches);

        std::set<TrackId> live;
        for (const auto& t : b.state.tracks) ASSERT_TRUE(live.insert(t.id).second);
    }
}

TEST(TrackerProperties, GreedyIsOptimalWhenMotionIsSmall) {
    // each animal moves less than half the gap to any other, so greedy and optimal agree
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> step(-4.0, 4.0);
    std::uniform_int_distribution<int> n(1, 4);
    for (int iter = 0; iter < 300; ++iter) {
        std::vector<Point2> first_c, second_c;
        const int k = n(rng);
        for (int i = 0; i < k; ++i) {
            const Point2 c{40.0 + 60.0 * i + step(rng), 200.0 + step(rng)};
            first_c.push_back(c);
            second_c.push_back({c.x + step(rng), c.y + step(rng)});
        }
        std::shuffle(second_c.begin(), second_c.end(), rng);
        const auto a = tracker_update({}, frame_of(0, first_c), {});
        const auto b = tracker_update(a.state, frame_of(1, second_c), {});
        double cost = 0.0;
        for (const auto& [tid, d] : b.assignments.matches) cost += distance(first_c[tid], second_c[d]);
        ASSERT_EQ(b.assignments.matches.size(), first_c.size());
        ASSERT_NEAR(cost, oracle::optimal_assignment_cost(first_c, second_c), 1e-9);
    }
}

}  // namespace
}  // namespace animalguard
