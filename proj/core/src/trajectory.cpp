#include "goba/trajectory.hpp"

#include <cmath>
#include <string>

#include "goba/errors.hpp"

namespace goba {

namespace {

bool finite_step(const ActionVector& a) {
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(a.dp[i]) || !std::isfinite(a.dr[i])) return false;
    }
    return std::isfinite(a.g);
}

void require_finite(const Trajectory& traj) {
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(traj.start_pose[i])) {
            throw DomainError("integrate_positions: non-finite start_pose component " +
                              std::to_string(i));
        }
    }
    for (std::size_t t = 0; t < traj.steps.size(); ++t) {
        if (!finite_step(traj.steps[t])) {
            throw DomainError("integrate_positions: non-finite component at step " +
                              std::to_string(t));
        }
    }
}

} // namespace

std::vector<Vec3> integrate_positions(const Trajectory& traj) {
    require_finite(traj);
    std::vector<Vec3> positions;
    positions.reserve(traj.steps.size() + 1);
    Vec3 p{traj.start_pose[0], traj.start_pose[1], traj.start_pose[2]};
    positions.push_back(p);
    for (const ActionVector& a : traj.steps) {
        p[0] += a.dp[0];
        p[1] += a.dp[1];
        p[2] += a.dp[2];
        positions.push_back(p);
    }
    return positions;
}

Vec3 final_position(const Trajectory& traj) {
    require_finite(traj);
    Vec3 p{traj.start_pose[0], traj.start_pose[1], traj.start_pose[2]};
    for (const ActionVector& a : traj.steps) {
        p[0] += a.dp[0];
        p[1] += a.dp[1];
        p[2] += a.dp[2];
    }
    return p;
}

} // namespace goba
