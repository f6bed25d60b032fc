#include "tng/expert.hpp"

#include <algorithm>
#include <cmath>

#include "tng/error.hpp"

namespace tng {

void validate(const ExpertConfig& cfg) {
  if (!(cfg.lookahead > 0.0)) throw ValidationError("expert.lookahead must be positive");
  if (!(cfg.cruise_speed > 0.0)) throw ValidationError("expert.cruise_speed must be positive");
  if (!(cfg.max_angular > 0.0)) throw ValidationError("expert.max_angular must be positive");
  if (!(cfg.lost_distance > 0.0)) throw ValidationError("expert.lost_distance must be positive");
}

double lookahead_bearing(const Pose& pose, const Trajectory& traj, double lookahead) {
  const TrackError te = cross_track(pose, traj);
  const Vec2 target = traj.point_at(te.arc_position + lookahead);
  return normalize_angle(std::atan2(target.y - pose.y, target.x - pose.x) - pose.theta);
}

std::optional<MotorCommand> try_expert_command(const Pose& pose, const Trajectory& traj,
                                               const ExpertConfig& cfg) {
  const TrackError te = cross_track(pose, traj);
  if (te.distance > cfg.lost_distance) return std::nullopt;
  const Vec2 target = traj.point_at(te.arc_position + cfg.lookahead);
  const double alpha =
      normalize_angle(std::atan2(target.y - pose.y, target.x - pose.x) - pose.theta);
  const double angular = std::clamp(2.0 * cfg.cruise_speed * std::sin(alpha) / cfg.lookahead,
                                    -cfg.max_angular, cfg.max_angular);
  return clip_command({cfg.cruise_speed, angular});
}

MotorCommand expert_command(const Pose& pose, const Trajectory& traj, const ExpertConfig& cfg) {
  auto cmd = try_expert_command(pose, traj, cfg);
  if (!cmd) {
    throw ExpertLostError("expert lost: pose (" + std::to_string(pose.x) + ", " +
                          std::to_string(pose.y) + ") is more than " +
                          std::to_string(cfg.lost_distance) + " m from trajectory " +
                          std::to_string(traj.id()));
  }
  return *cmd;
}

}  // namespace tng
