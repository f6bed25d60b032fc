#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace tng {

// y = W^T x + b. Rows of `weights` index input features, columns outputs.
struct LinearHead {
  Eigen::MatrixXd weights;  // d x k
  Eigen::VectorXd bias;     // k (zero and unused when use_bias is false)
  bool use_bias = true;

  int input_dim() const { return static_cast<int>(weights.rows()); }
  int output_dim() const { return static_cast<int>(weights.cols()); }
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;  // n x k
};

// Fully connected ReLU network; the last layer is linear.
struct MlpHead {
  std::vector<int> sizes;  // [d, hidden..., k]
  std::vector<Eigen::MatrixXd> weights;  // layer l: sizes[l+1] x sizes[l]
  std::vector<Eigen::VectorXd> biases;

  int input_dim() const { return sizes.empty() ? 0 : sizes.front(); }
  int output_dim() const { return sizes.empty() ? 0 : sizes.back(); }
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;  // n x k
  Eigen::Index parameter_count() const;
};

enum class Optimizer { ClosedForm, Adam, Momentum };

struct GradientConfig {
  double rate = 0.05;   // Adam base rate; initial step for backtracking momentum
  int steps = 20000;
  int batch = 0;        // 0 or >= n means full batch
  bool cosine_decay = true;
  int record_every = 1;  // loss trace stride
  std::uint64_t seed = 0;  // minibatch sampling and MLP initialisation
  double tolerance = 1e-10;  // stop once the max-abs gradient falls below
};

struct LinearFit {
  LinearHead head;
  std::vector<double> loss_trace;
  int steps_taken = 0;
};

struct MlpFit {
  MlpHead head;
  std::vector<double> loss_trace;
  int steps_taken = 0;
};

// sum_i ||y_i - f(x_i)||^2 + lambda * ||theta||^2, biases included in theta.
double ridge_objective(const LinearHead& head, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                       double lambda);
double ridge_objective(const MlpHead& head, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                       double lambda);

// Exact minimiser of the ridge objective. lambda must be > 0.
LinearHead solve_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda,
                       bool use_bias = true);

// Iterative minimiser (Adam or monotone momentum) of the same objective.
LinearFit fit_ridge_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda,
                             Optimizer optimizer, const GradientConfig& cfg,
                             bool use_bias = true);

MlpHead init_mlp(const std::vector<int>& sizes, std::uint64_t seed);
MlpFit fit_mlp(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda,
               const std::vector<int>& hidden, const GradientConfig& cfg);

// Accelerated gradient descent that never accepts an uphill step: when the
// momentum candidate would raise the objective, momentum is reset and a
// plain gradient step is taken instead (backtracked unless `fixed_step` > 0).
struct MomentumResult {
  Eigen::VectorXd theta;
  std::vector<double> loss_trace;
  int steps_taken = 0;
};
using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd* grad)>;
MomentumResult minimize_monotone(const ObjectiveFn& objective, Eigen::VectorXd theta,
                                 const GradientConfig& cfg, double fixed_step = 0.0);

}  // namespace tng
