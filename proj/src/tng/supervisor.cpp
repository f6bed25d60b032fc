#include "tng/supervisor.hpp"

#include <algorithm>
#include <cmath>

#include "tng/error.hpp"

namespace tng {

void validate(const SupervisorConfig& cfg) {
  if (!(cfg.max_cross_track > 0.0)) throw ValidationError("supervisor.max_cross_track must be > 0");
  if (!(cfg.max_heading_error > 0.0)) {
    throw ValidationError("supervisor.max_heading_error must be > 0");
  }
  if (!(cfg.grace >= 0.0)) throw ValidationError("supervisor.grace must be >= 0");
  if (!(cfg.recover_to >= 0.0 && cfg.recover_to < cfg.max_cross_track)) {
    throw ValidationError("supervisor.recover_to must lie in [0, max_cross_track)");
  }
  validate(cfg.recovery);
}

SupervisorStep supervisor_step(const Pose& pose, const Trajectory& traj,
                               const SupervisorConfig& cfg, SupervisorState& state, double dt) {
  const TrackError te = cross_track(pose, traj);
  SupervisorStep out;
  if (state.mode == SupervisorMode::Intervening) {
    if (te.distance <= cfg.recover_to) {
      state.mode = SupervisorMode::Nominal;
      state.violation_time = 0.0;
      out.ended = true;
    }
    out.mode = state.mode;
    return out;
  }
  const bool off_track = te.distance > cfg.max_cross_track;
  const bool misaligned = std::abs(te.heading_error) > cfg.max_heading_error;
  if (off_track || misaligned) {
    state.violation_time += dt;
    // Tolerate float drift in the accumulated tick lengths.
    if (state.violation_time >= cfg.grace - 1e-9) {
      state.mode = SupervisorMode::Intervening;
      state.trigger = off_track ? kTriggerCrossTrack : kTriggerHeading;
      state.violation_time = 0.0;
      out.started = true;
    }
  } else {
    state.violation_time = 0.0;
  }
  out.mode = state.mode;
  return out;
}

double percentage_autonomy(double human_time, double total_time) {
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw InvalidInputError("percentage autonomy needs a positive total time");
  }
  if (!(human_time >= 0.0) || human_time > total_time * (1.0 + 1e-12)) {
    throw InvalidInputError("human time must lie in [0, total time]");
  }
  return std::clamp(100.0 * (1.0 - human_time / total_time), 0.0, 100.0);
}

}  // namespace tng
