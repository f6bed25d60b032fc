#pragma once

#include <string>
#include <vector>

#include "tng/expert.hpp"
#include "tng/geometry.hpp"

namespace tng {

struct SupervisorConfig {
  double max_cross_track = 0.75;   // m
  double max_heading_error = 1.2;  // rad
  double grace = 1.0;              // s a violation must persist
  double recover_to = 0.1;         // m
  ExpertConfig recovery;           // expert used while intervening
};

void validate(const SupervisorConfig& cfg);

enum class SupervisorMode { Nominal, Intervening };

inline constexpr const char* kTriggerCrossTrack = "max_cross_track";
inline constexpr const char* kTriggerHeading = "max_heading_error";

struct SupervisorState {
  SupervisorMode mode = SupervisorMode::Nominal;
  double violation_time = 0.0;
  std::string trigger;  // set when an intervention starts
};

struct SupervisorStep {
  SupervisorMode mode = SupervisorMode::Nominal;
  bool started = false;  // intervention begins this tick
  bool ended = false;    // intervention ended this tick (robot is back in control)
};

// Evaluated once per tick before the command is chosen. A violation must
// persist for `grace` seconds (accumulated per tick of length dt) before an
// intervention starts; the intervention ends once cross-track <= recover_to.
SupervisorStep supervisor_step(const Pose& pose, const Trajectory& traj,
                               const SupervisorConfig& cfg, SupervisorState& state, double dt);

struct Intervention {
  double start = 0.0;
  double end = 0.0;
  std::string trigger;
};

// Percentage autonomy 100 * (1 - human_time / total_time). total_time must be > 0.
double percentage_autonomy(double human_time, double total_time);

}  // namespace tng
