#include <doctest.h>

#include "goba/errors.hpp"
#include "goba/rng.hpp"
#include "goba/trajectory.hpp"

#include "helpers.hpp"

using namespace goba;

TEST_CASE("integrate_positions follows cumulative position deltas") {
    const Trajectory traj = test::make_trajectory({0, 0, 0}, {{1, 0, 0}, {0, 1, 0}});
    const auto positions = integrate_positions(traj);
    REQUIRE(positions.size() == 3);
    CHECK(positions[0] == Vec3{0, 0, 0});
    CHECK(positions[1] == Vec3{1, 0, 0});
    CHECK(positions[2] == Vec3{1, 1, 0});
}

TEST_CASE("integrate_positions of an empty trajectory is just the start pose") {
    const Trajectory traj = test::make_trajectory({0.5f, -0.25f, 0.125f}, {});
    const auto positions = integrate_positions(traj);
    REQUIRE(positions.size() == 1);
    CHECK(positions[0] == Vec3{0.5, -0.25, 0.125});
}

TEST_CASE("integrate_positions matches an independent running sum on random steps") {
    Rng rng(7);
    Trajectory traj;
    traj.start_pose = {0.1f, 0.2f, 0.3f};
    for (int i = 0; i < 100; ++i) {
        ActionVector a;
        for (int c = 0; c < 3; ++c) a.dp[c] = static_cast<float>(rng.uniform(-0.05, 0.05));
        traj.steps.push_back(a);
    }

    // Oracle: plain per-axis accumulation, independent of the implementation.
    double acc[3] = {traj.start_pose[0], traj.start_pose[1], traj.start_pose[2]};
    for (const ActionVector& a : traj.steps) {
        for (int c = 0; c < 3; ++c) acc[c] += a.dp[c];
    }

    const auto positions = integrate_positions(traj);
    REQUIRE(positions.size() == 101);
    CHECK(positions.back() == Vec3{acc[0], acc[1], acc[2]});
    CHECK(final_position(traj) == Vec3{acc[0], acc[1], acc[2]});
}

TEST_CASE("integrate_positions rejects non-finite components with the step index") {
    Trajectory traj = test::make_trajectory({0, 0, 0}, {{1, 0, 0}, {0, 1, 0}});
    traj.steps[1].dp[2] = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_WITH_AS(integrate_positions(traj),
                         "integrate_positions: non-finite component at step 1", DomainError);

    Trajectory bad_start = test::make_trajectory({0, 0, 0}, {});
    bad_start.start_pose[0] = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(integrate_positions(bad_start), DomainError);
}

TEST_CASE("final position is invariant under re-chunking of the step sequence") {
    // Deltas are dyadic rationals so every partial sum is exact in float and
    // double; merging chunks must then reproduce the final point bit for bit.
    Rng rng(11);
    Trajectory fine = test::make_trajectory({0.25f, -0.5f, 0.125f}, {});
    for (int i = 0; i < 64; ++i) {
        ActionVector a;
        for (int c = 0; c < 3; ++c) {
            a.dp[c] = static_cast<float>(static_cast<int>(rng.below(17)) - 8) / 1024.0f;
        }
        fine.steps.push_back(a);
    }

    Trajectory chunked;
    chunked.start_pose = fine.start_pose;
    std::size_t i = 0;
    while (i < fine.steps.size()) {
        const std::size_t len = std::min<std::size_t>(1 + rng.below(5), fine.steps.size() - i);
        ActionVector merged;
        for (std::size_t j = i; j < i + len; ++j) {
            for (int c = 0; c < 3; ++c) merged.dp[c] += fine.steps[j].dp[c];
        }
        chunked.steps.push_back(merged);
        i += len;
    }

    CHECK(final_position(fine) == final_position(chunked));
    CHECK(integrate_positions(chunked).size() == chunked.steps.size() + 1);
}
