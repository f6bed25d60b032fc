#include "tng/ridge.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "tng/error.hpp"
#include "tng/geometry.hpp"

namespace tng {

namespace {

void check_training_data(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda) {
  if (x.rows() == 0) throw InvalidInputError("training data is empty");
  if (x.rows() != y.rows()) throw DimensionMismatchError("training targets", x.rows(), y.rows());
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidInputError("ridge lambda must be > 0 (got " + std::to_string(lambda) + ")");
  }
  if (!x.allFinite() || !y.allFinite()) throw InvalidInputError("training data is not finite");
}

// Design matrix with an optional trailing column of ones.
Eigen::MatrixXd design(const Eigen::MatrixXd& x, bool use_bias) {
  if (!use_bias) return x;
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.leftCols(x.cols()) = x;
  a.col(x.cols()).setOnes();
  return a;
}

LinearHead head_from_theta(const Eigen::MatrixXd& theta, Eigen::Index d, bool use_bias) {
  LinearHead h;
  h.use_bias = use_bias;
  h.weights = theta.topRows(d);
  h.bias = use_bias ? Eigen::VectorXd(theta.row(d).transpose())
                    : Eigen::VectorXd::Zero(theta.cols());
  return h;
}

double cosine_rate(const GradientConfig& cfg, int t) {
  if (!cfg.cosine_decay) return cfg.rate;
  return cfg.rate * 0.5 * (1.0 + std::cos(kPi * t / cfg.steps)) + 1e-6;
}

}  // namespace

Eigen::VectorXd LinearHead::forward(const Eigen::VectorXd& x) const {
  if (x.size() != weights.rows()) throw DimensionMismatchError("linear head input", weights.rows(), x.size());
  Eigen::VectorXd out = weights.transpose() * x;
  if (use_bias) out += bias;
  return out;
}

Eigen::MatrixXd LinearHead::forward_batch(const Eigen::MatrixXd& x) const {
  if (x.cols() != weights.rows()) throw DimensionMismatchError("linear head input", weights.rows(), x.cols());
  Eigen::MatrixXd out = x * weights;
  if (use_bias) out.rowwise() += bias.transpose();
  return out;
}

Eigen::VectorXd MlpHead::forward(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim()) throw DimensionMismatchError("mlp head input", input_dim(), x.size());
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    a = weights[l] * a + biases[l];
    if (l + 1 < weights.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

Eigen::MatrixXd MlpHead::forward_batch(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim()) throw DimensionMismatchError("mlp head input", input_dim(), x.cols());
  Eigen::MatrixXd a = x.transpose();
  for (std::size_t l = 0; l < weights.size(); ++l) {
    a = (weights[l] * a).colwise() + biases[l];
    if (l + 1 < weights.size()) a = a.cwiseMax(0.0);
  }
  return a.transpose();
}

Eigen::Index MlpHead::parameter_count() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

double ridge_objective(const LinearHead& head, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                       double lambda) {
  const double fit = (y - head.forward_batch(x)).squaredNorm();
  double penalty = head.weights.squaredNorm();
  if (head.use_bias) penalty += head.bias.squaredNorm();
  return fit + lambda * penalty;
}

double ridge_objective(const MlpHead& head, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                       double lambda) {
  double penalty = 0.0;
  for (std::size_t l = 0; l < head.weights.size(); ++l) {
    penalty += head.weights[l].squaredNorm() + head.biases[l].squaredNorm();
  }
  return (y - head.forward_batch(x)).squaredNorm() + lambda * penalty;
}

LinearHead solve_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda,
                       bool use_bias) {
  check_training_data(x, y, lambda);
  const Eigen::MatrixXd a = design(x, use_bias);
  Eigen::MatrixXd gram = a.transpose() * a;
  gram.diagonal().array() += lambda;
  const Eigen::MatrixXd theta = gram.ldlt().solve(a.transpose() * y);
  if (!theta.allFinite()) throw Error(ErrorCode::Runtime, "ridge normal equations are singular");
  return head_from_theta(theta, x.cols(), use_bias);
}

MomentumResult minimize_monotone(const ObjectiveFn& objective, Eigen::VectorXd theta,
                                 const GradientConfig& cfg, double fixed_step) {
  MomentumResult out;
  Eigen::VectorXd grad(theta.size());
  double f = objective(theta, &grad);
  out.loss_trace.push_back(f);
  Eigen::VectorXd prev = theta;
  Eigen::VectorXd cand(theta.size());
  Eigen::VectorXd cand_grad(theta.size());
  Eigen::VectorXd look_grad(theta.size());
  double step = fixed_step > 0.0 ? fixed_step : cfg.rate;
  const int stride = std::max(1, cfg.record_every);
  int k = 0;
  int it = 0;
  for (it = 1; it <= cfg.steps; ++it) {
    if (grad.cwiseAbs().maxCoeff() < cfg.tolerance) break;
    ++k;
    const Eigen::VectorXd look = theta + (double(k - 1) / double(k + 2)) * (theta - prev);
    objective(look, &look_grad);
    cand = look - step * look_grad;
    double fc = objective(cand, &cand_grad);
    if (!(fc <= f)) {
      // Restart: drop momentum and fall back to a descent step from theta.
      k = 0;
      const double gg = grad.squaredNorm();
      bool accepted = false;
      for (int tries = 0; tries < 60; ++tries) {
        cand = theta - step * grad;
        fc = objective(cand, &cand_grad);
        if (fc <= f - (fixed_step > 0.0 ? 0.0 : 1e-4 * step * gg)) {
          accepted = true;
          break;
        }
        if (fixed_step > 0.0) break;
        step *= 0.5;
      }
      if (!accepted) break;  // no descent left at working precision
    } else if (fixed_step <= 0.0) {
      step *= 1.05;
    }
    prev = theta;
    theta = cand;
    grad = cand_grad;
    f = fc;
    if (it % stride == 0) out.loss_trace.push_back(f);
  }
  out.steps_taken = it - 1;
  if (out.steps_taken % stride != 0 || out.loss_trace.size() == 1) out.loss_trace.push_back(f);
  out.theta = std::move(theta);
  return out;
}

LinearFit fit_ridge_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda,
                             Optimizer optimizer, const GradientConfig& cfg, bool use_bias) {
  check_training_data(x, y, lambda);
  if (cfg.steps < 1) throw InvalidInputError("gradient steps must be >= 1");
  if (!(cfg.rate > 0.0)) throw InvalidInputError("gradient rate must be > 0");
  if (optimizer == Optimizer::ClosedForm) {
    LinearFit fit;
    fit.head = solve_ridge(x, y, lambda, use_bias);
    fit.loss_trace.push_back(ridge_objective(fit.head, x, y, lambda));
    return fit;
  }

  const Eigen::MatrixXd a = design(x, use_bias);
  const Eigen::Index p = a.cols();
  const Eigen::Index k = y.cols();
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::MatrixXd ay = a.transpose() * y;
  const double yy = y.squaredNorm();

  // Objective and gradient from the precomputed normal-equation blocks.
  auto full_objective = [&](const Eigen::MatrixXd& theta, Eigen::MatrixXd* g) {
    const Eigen::MatrixXd gt = gram * theta;
    if (g) *g = 2.0 * (gt - ay + lambda * theta);
    return (theta.array() * gt.array()).sum() - 2.0 * (theta.array() * ay.array()).sum() + yy +
           lambda * theta.squaredNorm();
  };

  LinearFit fit;
  const int stride = std::max(1, cfg.record_every);

  if (optimizer == Optimizer::Momentum) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const double lipschitz = 2.0 * (es.eigenvalues().maxCoeff() + lambda);
    ObjectiveFn obj = [&](const Eigen::VectorXd& flat, Eigen::VectorXd* grad) {
      const Eigen::Map<const Eigen::MatrixXd> theta(flat.data(), p, k);
      Eigen::MatrixXd g;
      const double f = full_objective(theta, grad ? &g : nullptr);
      if (grad) *grad = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
      return f;
    };
    MomentumResult r = minimize_monotone(obj, Eigen::VectorXd::Zero(p * k), cfg, 1.0 / lipschitz);
    const Eigen::Map<const Eigen::MatrixXd> theta(r.theta.data(), p, k);
    fit.head = head_from_theta(theta, x.cols(), use_bias);
    fit.loss_trace = std::move(r.loss_trace);
    fit.steps_taken = r.steps_taken;
    return fit;
  }

  // Adam on the mean objective (same minimiser), cosine-decayed rate.
  const bool minibatch = cfg.batch > 0 && cfg.batch < n;
  std::mt19937_64 engine(cfg.seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, k);
  Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(p, k);
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(p, k);
  Eigen::MatrixXd g(p, k);
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  double f = full_objective(theta, nullptr);
  fit.loss_trace.push_back(f);
  int t = 0;
  for (t = 1; t <= cfg.steps; ++t) {
    if (minibatch) {
      Eigen::MatrixXd ab(cfg.batch, p);
      Eigen::MatrixXd yb(cfg.batch, k);
      for (int r = 0; r < cfg.batch; ++r) {
        const Eigen::Index row = pick(engine);
        ab.row(r) = a.row(row);
        yb.row(r) = y.row(row);
      }
      const double scale = double(n) / cfg.batch;
      g = (2.0 * scale * ab.transpose() * (ab * theta - yb) + 2.0 * lambda * theta) / double(n);
    } else {
      full_objective(theta, &g);
      if (g.cwiseAbs().maxCoeff() < cfg.tolerance) break;
      g /= double(n);
    }
    m1 = beta1 * m1 + (1.0 - beta1) * g;
    m2 = beta2 * m2 + (1.0 - beta2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    const double rate = cosine_rate(cfg, t);
    theta.array() -= rate * (m1.array() / c1) / ((m2.array() / c2).sqrt() + 1e-12);
    if (t % stride == 0) fit.loss_trace.push_back(full_objective(theta, nullptr));
  }
  fit.steps_taken = t - 1;
  fit.head = head_from_theta(theta, x.cols(), use_bias);
  return fit;
}

MlpHead init_mlp(const std::vector<int>& sizes, std::uint64_t seed) {
  if (sizes.size() < 2) throw InvalidInputError("mlp needs at least input and output sizes");
  for (int s : sizes) {
    if (s < 1) throw InvalidInputError("mlp layer sizes must be >= 1");
  }
  MlpHead h;
  h.sizes = sizes;
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double sd = std::sqrt(2.0 / sizes[l]);
    Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = sd * normal(engine);
    }
    h.weights.push_back(std::move(w));
    h.biases.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
  }
  return h;
}

namespace {

Eigen::VectorXd flatten(const MlpHead& h) {
  Eigen::VectorXd v(h.parameter_count());
  Eigen::Index o = 0;
  for (std::size_t l = 0; l < h.weights.size(); ++l) {
    v.segment(o, h.weights[l].size()) =
        Eigen::Map<const Eigen::VectorXd>(h.weights[l].data(), h.weights[l].size());
    o += h.weights[l].size();
    v.segment(o, h.biases[l].size()) = h.biases[l];
    o += h.biases[l].size();
  }
  return v;
}

void unflatten(const Eigen::VectorXd& v, MlpHead& h) {
  Eigen::Index o = 0;
  for (std::size_t l = 0; l < h.weights.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(h.weights[l].data(), h.weights[l].size()) =
        v.segment(o, h.weights[l].size());
    o += h.weights[l].size();
    h.biases[l] = v.segment(o, h.biases[l].size());
    o += h.biases[l].size();
  }
}

}  // namespace

MlpFit fit_mlp(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda,
               const std::vector<int>& hidden, const GradientConfig& cfg) {
  check_training_data(x, y, lambda);
  std::vector<int> sizes{static_cast<int>(x.cols())};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(static_cast<int>(y.cols()));
  MlpHead head = init_mlp(sizes, cfg.seed);
  const Eigen::MatrixXd xt = x.transpose();
  const Eigen::MatrixXd yt = y.transpose();
  const std::size_t layers = head.weights.size();

  ObjectiveFn obj = [&](const Eigen::VectorXd& flat, Eigen::VectorXd* grad) {
    MlpHead h = head;
    unflatten(flat, h);
    std::vector<Eigen::MatrixXd> acts{xt};
    for (std::size_t l = 0; l < layers; ++l) {
      Eigen::MatrixXd z = (h.weights[l] * acts.back()).colwise() + h.biases[l];
      if (l + 1 < layers) z = z.cwiseMax(0.0);
      acts.push_back(std::move(z));
    }
    const Eigen::MatrixXd resid = acts.back() - yt;
    double penalty = 0.0;
    for (std::size_t l = 0; l < layers; ++l) {
      penalty += h.weights[l].squaredNorm() + h.biases[l].squaredNorm();
    }
    const double f = resid.squaredNorm() + lambda * penalty;
    if (grad) {
      MlpHead g = h;
      Eigen::MatrixXd delta = 2.0 * resid;
      for (std::size_t l = layers; l-- > 0;) {
        g.weights[l] = delta * acts[l].transpose() + 2.0 * lambda * h.weights[l];
        g.biases[l] = delta.rowwise().sum() + 2.0 * lambda * h.biases[l];
        if (l > 0) {
          delta = (h.weights[l].transpose() * delta).cwiseProduct(
              (acts[l].array() > 0.0).cast<double>().matrix());
        }
      }
      *grad = flatten(g);
    }
    return f;
  };

  MomentumResult r = minimize_monotone(obj, flatten(head), cfg);
  unflatten(r.theta, head);
  return {std::move(head), std::move(r.loss_trace), r.steps_taken};
}

}  // namespace tng
