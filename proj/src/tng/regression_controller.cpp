#include "tng/regression_controller.hpp"

#include "tng/error.hpp"

namespace tng {

int RegressionController::input_dim() const {
  return std::visit([](const auto& h) { return h.input_dim(); }, head);
}

RegressionController train_regression(const Dataset& data, const RegressionTrainConfig& cfg,
                                      std::uint64_t featurizer_hash) {
  if (data.empty()) throw InvalidInputError("cannot train a controller on an empty dataset");
  const Eigen::MatrixXd x = data.features();
  const Eigen::MatrixXd y = data.commands();
  RegressionController c;
  c.lambda = cfg.lambda;
  c.featurizer_hash = featurizer_hash;
  if (cfg.head == HeadKind::Linear) {
    LinearFit fit = fit_ridge_gradient(x, y, cfg.lambda, cfg.optimizer, cfg.gradient);
    c.head = std::move(fit.head);
    c.loss_trace = std::move(fit.loss_trace);
  } else {
    MlpFit fit = fit_mlp(x, y, cfg.lambda, cfg.hidden, cfg.gradient);
    c.head = std::move(fit.head);
    c.loss_trace = std::move(fit.loss_trace);
  }
  return c;
}

MotorCommand regression_act(const RegressionController& c, const Observation& obs) {
  if (obs.features.size() != c.input_dim()) {
    throw DimensionMismatchError("regression controller observation", c.input_dim(),
                                 obs.features.size());
  }
  const Eigen::VectorXd y = std::visit([&](const auto& h) { return h.forward(obs.features); }, c.head);
  MotorCommand cmd{y(0), y(1)};
  if (!is_finite(cmd)) return {0.0, 0.0};
  return clip_command(cmd);
}

}  // namespace tng
