#pragma once

#include <cstdint>
#include <string>

#include "tng/dataset.hpp"
#include "tng/ridge.hpp"

namespace tng {

inline constexpr double kVirtualWidth = 896.0;  // virtual image width, pixels
inline constexpr double kDefaultShift = 150.0;  // target offset for a turn, pixels
inline constexpr double kDefaultDeadband = 0.05;  // rad/s

struct DirectionLabel {
  double x = 0.0;           // target centre, virtual pixels in [0, W]
  double confidence = 1.0;  // [0, 1]
};

enum class DirectionClass { Left, None, Right };
DirectionClass direction_class(double angular, double deadband = kDefaultDeadband);

// Centred target for straight driving (|angular| <= deadband), shifted left
// by delta for a left turn and right by delta for a right turn.
DirectionLabel label_direction(const Pose& pose, const Trajectory& traj,
                               const MotorCommand& expert_cmd, double width = kVirtualWidth,
                               double shift = kDefaultShift, double deadband = kDefaultDeadband);

struct DetectorTrainConfig {
  double width = kVirtualWidth;
  double shift = kDefaultShift;
  double deadband = kDefaultDeadband;
  double lambda = 1.0;
  // Every training observation scores at least this confidence.
  double training_confidence = 0.9;
};

struct DirectionDetector {
  LinearHead regressor;  // d -> 1
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_std;
  double distance_scale = 1.0;  // confidence = exp(-0.5 * (r / scale)^2)
  double width = kVirtualWidth;
  double shift = kDefaultShift;
  double deadband = kDefaultDeadband;
  std::uint64_t featurizer_hash = 0;
  bool imbalanced = false;
  std::string warning;

  int input_dim() const { return regressor.input_dim(); }
};

// Fits the label centre by ridge regression and stores per-feature training
// statistics for the confidence model. Labels come from the sample commands.
DirectionDetector train_detector(const Dataset& data, const DetectorTrainConfig& cfg,
                                 std::uint64_t featurizer_hash);

// Root-mean-square z-score of the observation against the training statistics.
double feature_distance(const DirectionDetector& d, const Eigen::VectorXd& features);
double confidence_from_distance(const DirectionDetector& d, double distance);
DirectionLabel detect(const DirectionDetector& d, const Observation& obs);

struct PidGains {
  double kp = 0.01;   // per pixel
  double ki = 0.001;  // per pixel-second
  double kd = 0.0005;  // per pixel/second
  double integral_limit = 100.0;  // pixel-seconds
};

struct PidState {
  PidGains gains;
  double integral = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;
};

struct PidOutput {
  double u = 0.0;
  PidState state;
};

// u = -(kp e + ki I + kd de/dt), with the integral clamped to +-integral_limit
// and a zero derivative on the first call.
PidOutput pid_step(const PidState& pid, double error, double dt);

struct DetectionController {
  DirectionDetector detector;
  PidState pid;
  double cruise_speed = 0.5;
  double confidence_floor = 0.3;
};

struct DetectionAction {
  MotorCommand command;
  bool abstained = false;
  DirectionLabel label;
};

// Abstains (zero command, PID untouched) below the confidence floor.
DetectionAction detection_act(DetectionController& c, const Observation& obs, double dt);

}  // namespace tng
