#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tng/dataset.hpp"
#include "tng/environment.hpp"
#include "tng/expert.hpp"
#include "tng/regression_controller.hpp"

namespace tng {

inline constexpr double kDefaultDt = 0.1;

// Arc progress along a trajectory, accumulated from wrapped arc deltas so a
// closed loop counts laps and an open path counts distance from its start.
class ProgressTracker {
 public:
  ProgressTracker(const Trajectory& traj, const Pose& start);
  double update(const Pose& pose);  // returns total progress in metres
  double progress() const { return progress_; }
  double arc() const { return arc_; }

 private:
  const Trajectory* traj_;
  double arc_;
  double progress_ = 0.0;
};

struct CollectConfig {
  int laps = 3;  // passes for open trajectories
  double dt = kDefaultDt;
  ExpertConfig expert;
  std::uint64_t seed = 0;
};

struct CollectResult {
  Dataset data;
  int laps_completed = 0;
  bool aborted = false;
  std::string message;
  std::vector<Pose> lap_end_poses;
};

// Drives the expert around trajectory `traj_index`, recording an
// (observation, command, pose) triple at every step.
CollectResult collect_demonstrations(const Environment& env, std::size_t traj_index,
                                     const CollectConfig& cfg);

struct ShiftConfig {
  double max_lateral = 0.5;   // m
  double max_rotation = 0.4;  // rad
  int copies = 1;             // shifted copies per source sample
};

// Re-observes from the pose displaced `lateral` metres to the left of the
// heading and rotated by `rotational`, relabelled by the expert. Returns
// nothing when the displaced pose leaves the world or loses the expert.
std::optional<DemoSample> augment_shift(const DemoSample& sample, double lateral,
                                        double rotational, const Environment& env,
                                        const ExpertConfig& expert, NoiseStream& stream,
                                        const ShiftConfig& bounds = {});

struct AugmentResult {
  Dataset data;  // only the new samples
  std::size_t skipped = 0;
};

AugmentResult augment_dataset(const Dataset& base, const Environment& env,
                              const ExpertConfig& expert, const ShiftConfig& cfg,
                              std::uint64_t seed);

// Stand-ins for image-space augmentations: additive feature noise ("random
// lighting") and random feature masking ("regional dropout"). Labels are kept.
Dataset augment_feature_noise(const Dataset& base, double sigma, int copies, std::uint64_t seed);
Dataset augment_dropout(const Dataset& base, double fraction, int copies, std::uint64_t seed);

struct DaggerConfig {
  int steps = 0;  // rollout length, >= 1
  int iteration = 1;
  double dt = kDefaultDt;
  ExpertConfig expert;
  double max_deviation = 1.5;  // rollout truncates beyond this cross-track
  std::uint64_t seed = 0;
  double start_arc = 0.0;
};

struct DaggerResult {
  Dataset data;  // base followed by the newly labelled rollout states
  std::size_t rollout_steps = 0;
  std::size_t expert_lost_skips = 0;
  bool truncated = false;
  std::string reason;
};

// Rolls out the learner from the trajectory start and labels every visited
// observation with the expert. Retraining is left to the caller.
DaggerResult dagger_iterate(const RegressionController& learner, const Environment& env,
                            std::size_t traj_index, const Dataset& base, const DaggerConfig& cfg);

// Steps covering `laps` laps at cruise speed.
int steps_for_laps(const Trajectory& traj, double laps, const ExpertConfig& expert, double dt);

}  // namespace tng
