#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tng/detection.hpp"
#include "tng/environment.hpp"
#include "tng/executive.hpp"
#include "tng/expert.hpp"
#include "tng/graph.hpp"
#include "tng/pipeline.hpp"
#include "tng/regression_controller.hpp"
#include "tng/supervisor.hpp"

namespace tng {

// Closed-loop evaluation protocols: supervised laps, recovery from a heading
// offset, landmark-perturbation sweeps, DAgger studies and the all-pairs
// navigation matrix.

struct PolicyAction {
  MotorCommand command;
  bool abstained = false;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual void reset() {}
  virtual PolicyAction act(const Pose& pose, const Observation& obs, double dt) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;
};

// The pure-pursuit expert; reads the true pose instead of the observation.
class ExpertPolicy : public Policy {
 public:
  ExpertPolicy(const Trajectory& traj, ExpertConfig cfg = {});
  std::string name() const override { return "expert"; }
  PolicyAction act(const Pose& pose, const Observation& obs, double dt) override;
  std::unique_ptr<Policy> clone() const override;

 private:
  Trajectory traj_;
  ExpertConfig cfg_;
};

class RegressionPolicy : public Policy {
 public:
  explicit RegressionPolicy(RegressionController controller);
  std::string name() const override { return "regression"; }
  PolicyAction act(const Pose& pose, const Observation& obs, double dt) override;
  std::unique_ptr<Policy> clone() const override;

 private:
  RegressionController controller_;
};

class DetectionPolicy : public Policy {
 public:
  explicit DetectionPolicy(DetectionController controller);
  std::string name() const override { return "detection"; }
  void reset() override;
  PolicyAction act(const Pose& pose, const Observation& obs, double dt) override;
  std::unique_ptr<Policy> clone() const override;

 private:
  DetectionController initial_;
  DetectionController controller_;
};

std::unique_ptr<Policy> make_policy(const AnyController& controller);

struct LapConfig {
  int laps = 10;
  double dt = kDefaultDt;
  SupervisorConfig supervisor;
  double step_budget_factor = 3.0;  // budget = factor x (laps at cruise speed)
  double start_arc = 0.0;
  std::uint64_t seed = 0;
};

struct LapReport {
  std::string controller;
  double pa = 0.0;
  int laps_target = 0;
  int laps_completed = 0;
  bool budget_exhausted = false;  // partial report
  bool failed = false;            // expert lost during recovery
  double total_time = 0.0;
  double human_time = 0.0;
  double distance = 0.0;
  std::vector<Intervention> interventions;
  std::size_t abstentions = 0;
  double max_cross_track = 0.0;
  double median_cross_track = 0.0;
};

// Runs `policy` under supervision on a closed trajectory until `laps`
// completions or the step budget runs out.
LapReport run_lap_experiment(Policy& policy, const Environment& env, std::size_t traj_index,
                             const LapConfig& cfg);

struct RecoveryConfig {
  double heading_offset = 0.0;  // rad, added to the path heading
  double lateral_offset = 0.0;  // m, to the left of the path
  double arc = 0.0;             // start arc
  int steps = 300;
  int hold = 50;                // steps the error must stay below tolerance at the end
  double tolerance = 0.05;      // m
  double dt = kDefaultDt;
  std::uint64_t seed = 0;
};

struct RecoveryResult {
  double heading_offset = 0.0;
  bool converged = false;
  int converged_step = -1;  // first step of the final in-tolerance run
  double final_cross_track = 0.0;
  double max_cross_track = 0.0;
  bool left_bounds = false;
};

// Unsupervised rollout from an offset pose. Converged means the cross-track
// error is below tolerance at every step from some step k <= steps - hold
// through the last step.
RecoveryResult run_recovery(Policy& policy, const Environment& env, std::size_t traj_index,
                            const RecoveryConfig& cfg);

std::vector<RecoveryResult> recovery_envelope(Policy& policy, const Environment& env,
                                              std::size_t traj_index,
                                              const std::vector<double>& offsets,
                                              const RecoveryConfig& cfg);

// Displaces each landmark by N(0, magnitude^2) per axis and re-seeds the
// observation noise. Trajectories and featurizer settings are untouched.
Environment perturb_environment(const Environment& env, double magnitude, std::uint64_t seed);

struct DegradationRow {
  std::string controller;
  std::vector<double> pa;     // per magnitude
  std::vector<double> delta;  // pa[m] - pa[0]
};

struct DegradationReport {
  std::vector<double> magnitudes;
  std::vector<DegradationRow> rows;
  std::uint64_t seed = 0;
};

struct DegradationConfig {
  std::vector<double> magnitudes{0.0, 0.1, 0.2, 0.4};
  LapConfig laps;
  std::uint64_t seed = 0;
};

// Every policy runs the lap protocol on each perturbed copy of `env`.
DegradationReport run_degradation_study(const std::vector<Policy*>& policies,
                                        const Environment& env, std::size_t traj_index,
                                        const DegradationConfig& cfg);

struct DaggerStudyConfig {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int iterations = 3;
  ControllerTrainConfig training;  // augmentation is switched off by default
  LapConfig laps;

  DaggerStudyConfig();
};

struct DaggerStudyReport {
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<std::size_t>> interventions;  // [seed][iteration]
  std::vector<std::vector<double>> pa;                  // [seed][iteration]
  std::vector<double> median_interventions;             // per iteration
  bool non_increasing = false;
};

DaggerStudyReport run_dagger_study(const Environment& env, std::size_t traj_index,
                                   const DaggerStudyConfig& cfg);

struct MatrixConfig {
  std::uint64_t seed = 0;
  int jobs = 1;
  EpisodeConfig episode;
  double start_clearance = 0.8;  // m from every other trajectory
  double goal_window = 0.15;     // m
  int goal_captures = 8;
};

struct MatrixCell {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::size_t start_vertex = 0;  // classified
  std::size_t goal_vertex = 0;   // identified
  double pa = 0.0;
  double distance = 0.0;
  std::size_t interventions = 0;
  double total_time = 0.0;
  double human_time = 0.0;
  Outcome outcome = Outcome::Failed;
  bool no_path = false;
  std::string failure_reason;
  std::size_t hops = 0;
};

struct MatrixReport {
  std::size_t size = 0;
  std::vector<MatrixCell> cells;  // row-major over ordered pairs, diagonal skipped
  double mean_pa = 0.0;           // over cells that ran
  double total_distance = 0.0;
  std::size_t done = 0;
  std::size_t flagged = 0;

  const MatrixCell* cell(std::size_t src, std::size_t dst) const;
};

MatrixReport run_navigation_matrix(const TngGraph& graph, const Environment& env,
                                   const MatrixConfig& cfg);

// One matrix cell; exposed for the CLI `navigate` command.
MatrixCell run_navigation_episode(const TngGraph& graph, const Environment& env, std::size_t src,
                                  std::size_t dst, const MatrixConfig& cfg, EpisodeLog* log = nullptr);

double median(std::vector<double> values);

}  // namespace tng
