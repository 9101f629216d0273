#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "goba/geometry.hpp"

namespace goba {

// One 7-DoF control step: relative position and rotation deltas plus the
// gripper signal. Components are stored in single precision to match the
// on-disk blob format bit for bit.
struct ActionVector {
    std::array<float, 3> dp{}; // position deltas, meters
    std::array<float, 3> dr{}; // rotation deltas, radians
    float g = 0.0f;            // gripper control, [-1, 1]

    friend bool operator==(const ActionVector&, const ActionVector&) = default;
};

struct Trajectory {
    std::array<float, 3> start_pose{}; // meters
    std::vector<ActionVector> steps;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// End-effector positions recovered by cumulative summation of the position
// deltas: result[0] = start_pose, result[t] = result[t-1] + dp_t. Rotation
// deltas are carried in the type but never integrated. Throws DomainError
// naming the first step with a non-finite component.
std::vector<Vec3> integrate_positions(const Trajectory& traj);

// Last element of integrate_positions without materializing the sequence.
Vec3 final_position(const Trajectory& traj);

} // namespace goba
