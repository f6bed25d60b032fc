#include "tng/detection.hpp"

#include <algorithm>
#include <cmath>

#include "tng/error.hpp"

namespace tng {

DirectionClass direction_class(double angular, double deadband) {
  if (std::abs(angular) <= deadband) return DirectionClass::None;
  return angular > 0.0 ? DirectionClass::Left : DirectionClass::Right;
}

DirectionLabel label_direction(const Pose& /*pose*/, const Trajectory& /*traj*/,
                               const MotorCommand& expert_cmd, double width, double shift,
                               double deadband) {
  if (!(width > 0.0)) throw InvalidInputError("label_direction: width must be positive");
  const double centre = 0.5 * width;
  switch (direction_class(expert_cmd.angular, deadband)) {
    case DirectionClass::Left:
      return {centre - shift, 1.0};
    case DirectionClass::Right:
      return {centre + shift, 1.0};
    case DirectionClass::None:
      break;
  }
  return {centre, 1.0};
}

DirectionDetector train_detector(const Dataset& data, const DetectorTrainConfig& cfg,
                                 std::uint64_t featurizer_hash) {
  if (data.empty()) throw InvalidInputError("cannot train a detector on an empty dataset");
  if (!(cfg.width > 0.0)) throw InvalidInputError("detector width must be positive");
  if (!(cfg.shift >= 0.0 && cfg.shift < 0.5 * cfg.width)) {
    throw InvalidInputError("detector shift must lie in [0, W/2)");
  }
  if (!(cfg.training_confidence > 0.0 && cfg.training_confidence < 1.0)) {
    throw InvalidInputError("training_confidence must lie in (0, 1)");
  }
  const Eigen::MatrixXd x = data.features();
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd y(n, 1);
  int counts[3] = {0, 0, 0};
  for (Eigen::Index i = 0; i < n; ++i) {
    const DemoSample& s = data[static_cast<std::size_t>(i)];
    ++counts[static_cast<int>(direction_class(s.command.angular, cfg.deadband))];
    y(i, 0) = 0.5 * cfg.width;
    const double a = s.command.angular;
    if (std::abs(a) > cfg.deadband) y(i, 0) += a > 0.0 ? -cfg.shift : cfg.shift;
  }

  DirectionDetector d;
  d.width = cfg.width;
  d.shift = cfg.shift;
  d.deadband = cfg.deadband;
  d.featurizer_hash = featurizer_hash;
  if (counts[0] == 0 || counts[1] == 0 || counts[2] == 0) {
    d.imbalanced = true;
    d.warning = "training set lacks a direction class (left=" + std::to_string(counts[0]) +
                ", none=" + std::to_string(counts[1]) + ", right=" + std::to_string(counts[2]) +
                ")";
  }
  d.regressor = solve_ridge(x, y, cfg.lambda);
  d.feature_mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centred = x.rowwise() - d.feature_mean.transpose();
  d.feature_std = (centred.array().square().colwise().mean().sqrt() + 1e-9).transpose();

  double r_max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    r_max = std::max(r_max, feature_distance(d, x.row(i).transpose()));
  }
  r_max = std::max(r_max, 1e-9);
  d.distance_scale = r_max / std::sqrt(2.0 * std::log(1.0 / cfg.training_confidence));
  return d;
}

double feature_distance(const DirectionDetector& d, const Eigen::VectorXd& features) {
  if (features.size() != d.feature_mean.size()) {
    throw DimensionMismatchError("detector observation", d.feature_mean.size(), features.size());
  }
  const Eigen::ArrayXd z = (features - d.feature_mean).array() / d.feature_std.array();
  return std::sqrt(z.square().mean());
}

double confidence_from_distance(const DirectionDetector& d, double distance) {
  const double r = distance / d.distance_scale;
  return std::exp(-0.5 * r * r);
}

DirectionLabel detect(const DirectionDetector& d, const Observation& obs) {
  if (obs.features.size() != d.input_dim()) {
    throw DimensionMismatchError("detector observation", d.input_dim(), obs.features.size());
  }
  const double raw = d.regressor.forward(obs.features)(0);
  const double x = std::isfinite(raw) ? std::clamp(raw, 0.0, d.width) : 0.5 * d.width;
  return {x, confidence_from_distance(d, feature_distance(d, obs.features))};
}

PidOutput pid_step(const PidState& pid, double error, double dt) {
  if (!(dt > 0.0)) throw InvalidInputError("pid_step: dt must be positive");
  PidOutput out{0.0, pid};
  PidState& s = out.state;
  const double limit = std::abs(s.gains.integral_limit);
  s.integral = std::clamp(s.integral + error * dt, -limit, limit);
  const double derivative = s.has_prev ? (error - s.prev_error) / dt : 0.0;
  s.prev_error = error;
  s.has_prev = true;
  out.u = -(s.gains.kp * error + s.gains.ki * s.integral + s.gains.kd * derivative);
  return out;
}

DetectionAction detection_act(DetectionController& c, const Observation& obs, double dt) {
  if (!(dt > 0.0)) throw InvalidInputError("detection_act: dt must be positive");
  DetectionAction out;
  out.label = detect(c.detector, obs);
  if (out.label.confidence < c.confidence_floor) {
    out.abstained = true;
    out.command = {0.0, 0.0};
    return out;
  }
  const double half = 0.5 * c.detector.width;
  const double error = out.label.x - half;
  const PidOutput p = pid_step(c.pid, error, dt);
  c.pid = p.state;
  const double linear = c.cruise_speed * std::max(0.0, 1.0 - std::abs(error) / half);
  out.command = clip_command({linear, p.u});
  return out;
}

}  // namespace tng
