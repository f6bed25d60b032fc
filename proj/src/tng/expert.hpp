#pragma once

#include <optional>

#include "tng/geometry.hpp"

namespace tng {

struct ExpertConfig {
  double lookahead = 0.8;     // m
  double cruise_speed = 0.5;  // m/s
  double max_angular = 1.5;   // rad/s
  double lost_distance = 5.0;  // beyond this the expert gives up
};

void validate(const ExpertConfig& cfg);

// Pure pursuit toward the point `lookahead` metres further along the path
// from the nearest point. Throws ExpertLostError when the pose is more than
// `lost_distance` away from the trajectory.
MotorCommand expert_command(const Pose& pose, const Trajectory& traj, const ExpertConfig& cfg);
std::optional<MotorCommand> try_expert_command(const Pose& pose, const Trajectory& traj,
                                               const ExpertConfig& cfg);

// Bearing of the lookahead point in the robot frame, (-pi, pi].
double lookahead_bearing(const Pose& pose, const Trajectory& traj, double lookahead);

}  // namespace tng
