#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "tng/dataset.hpp"
#include "tng/ridge.hpp"

namespace tng {

enum class HeadKind { Linear, Mlp };

struct RegressionTrainConfig {
  double lambda = 1.0;
  HeadKind head = HeadKind::Linear;
  Optimizer optimizer = Optimizer::ClosedForm;  // Linear only; the MLP always uses Momentum
  GradientConfig gradient;
  std::vector<int> hidden{32};
};

struct RegressionController {
  std::variant<LinearHead, MlpHead> head;
  double lambda = 1.0;
  std::uint64_t featurizer_hash = 0;
  std::vector<double> loss_trace;

  int input_dim() const;
};

RegressionController train_regression(const Dataset& data, const RegressionTrainConfig& cfg,
                                      std::uint64_t featurizer_hash);

// Head output with each component clipped to [-kCommandClip, kCommandClip].
MotorCommand regression_act(const RegressionController& c, const Observation& obs);

}  // namespace tng
