#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tng/classifiers.hpp"
#include "tng/demonstrations.hpp"
#include "tng/detection.hpp"
#include "tng/environment.hpp"
#include "tng/graph.hpp"

namespace tng {

// End-to-end recipes that turn an environment into trained components.

struct DaggerIterationStats {
  int iteration = 0;
  std::size_t dataset_size = 0;
  std::size_t rollout_steps = 0;
  bool truncated = false;
  std::string reason;
};

struct ControllerTrainConfig {
  CollectConfig collect;  // laps default 3
  bool augment = true;
  ShiftConfig shift;
  RegressionTrainConfig regression;
  int dagger_iterations = 3;
  double dagger_laps = 2.0;  // rollout length per iteration, in laps
  double dagger_max_deviation = 1.5;
  DetectorTrainConfig detector;
  PidGains pid;
  double confidence_floor = 0.3;
  std::uint64_t seed = 0;
};

struct TrainedRegression {
  RegressionController controller;
  Dataset expert;      // expert laps
  Dataset training;    // everything the final controller was fitted on
  std::vector<DaggerIterationStats> dagger;
  std::size_t augmentation_skipped = 0;
};

// Collect -> optional shift augmentation -> ridge -> DAgger iterations.
// `on_iteration` (if set) sees the controller after the base fit (iteration 0)
// and after every DAgger retrain.
using IterationCallback = std::function<void(int iteration, const RegressionController&)>;
TrainedRegression train_regression_pipeline(const Environment& env, std::size_t traj_index,
                                            const ControllerTrainConfig& cfg,
                                            const IterationCallback& on_iteration = {});

// Collect -> optional shift augmentation -> direction detector + PID.
DetectionController train_detection_pipeline(const Environment& env, std::size_t traj_index,
                                             const ControllerTrainConfig& cfg,
                                             Dataset* training = nullptr);

enum class ControllerKind { Regression, Detection };
enum class WeightMode { Arc, Hops };

struct GraphBuildConfig {
  ControllerKind controller = ControllerKind::Regression;
  ControllerTrainConfig training;
  ClassifierTrainConfig classifier;
  WeightMode weights = WeightMode::Arc;
  double window = 0.25;        // largest arc offset, m, at which a crossing exemplar may match
  int exemplar_captures = 8;   // noisy captures averaged per exemplar
  std::uint64_t seed = 0;
};

// Arc window radius in feature space: the largest noiseless feature distance
// between `pose_at(arc)` and the poses `window` metres before or after it.
double window_radius(const Environment& env, const Trajectory& traj, double arc, double window);

// Threshold that admits the window plus the expected observation noise.
double exemplar_threshold(double window_radius, int feature_dim, double noise_sigma);

// Averages `captures` observations of `pose` (noise averages out).
Observation capture(const Environment& env, const Pose& pose, int captures, NoiseStream& stream);

// Exemplars for the crossing of trajectories i and j: one capture along each
// trajectory's heading, shared by the i->j and j->i classifiers.
std::vector<TngEdge> enroll_environment_edges(const Environment& env, const GraphBuildConfig& cfg,
                                              NoiseStream& stream);

struct NavigationBuild {
  TngGraph graph;
  BuildReport report;
  std::vector<TrainedRegression> regression_details;  // empty for detection graphs
};

NavigationBuild build_navigation_graph(const Environment& env, const GraphBuildConfig& cfg);

// Assembles a graph from already trained parts.
NavigationBuild assemble_navigation_graph(const Environment& env,
                                          std::vector<AnyController> controllers,
                                          TrajectoryClassifier classifier,
                                          const GraphBuildConfig& cfg);

struct SampledPose {
  Pose pose;
  double arc = 0.0;
  double clearance = 0.0;  // distance to the nearest other trajectory
};

// Random pose on trajectory `traj_index` at least `min_clearance` from every
// other trajectory (the best of `attempts` draws when none qualifies).
SampledPose sample_pose(const Environment& env, std::size_t traj_index, double min_clearance,
                        NoiseStream& stream, int attempts = 1000);

GoalReacher make_goal_reacher_for(const Environment& env, std::size_t traj_index,
                                  const SampledPose& goal, const Observation& goal_obs,
                                  double window);

}  // namespace tng
