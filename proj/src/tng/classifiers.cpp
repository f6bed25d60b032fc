#include "tng/classifiers.hpp"

#include <cmath>
#include <limits>

#include "tng/error.hpp"

namespace tng {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - m).exp().matrix();
  return p / p.sum();
}

std::size_t argmax_first(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw InvalidInputError("argmax of an empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return static_cast<std::size_t>(best);
}

Classification classify_logits(const Eigen::VectorXd& logits) {
  Classification c;
  c.index = argmax_first(logits);
  c.indicator.assign(static_cast<std::size_t>(logits.size()), 0);
  c.indicator[c.index] = 1;
  c.probabilities = softmax(logits);
  return c;
}

Classification classify_trajectory(const TrajectoryClassifier& clf, const Observation& obs) {
  if (obs.features.size() != clf.input_dim()) {
    throw DimensionMismatchError("trajectory classifier observation", clf.input_dim(),
                                 obs.features.size());
  }
  return classify_logits(clf.head.forward(obs.features));
}

TrajectoryClassifier train_trajectory_classifier(const std::vector<Dataset>& per_class,
                                                 const ClassifierTrainConfig& cfg,
                                                 std::uint64_t featurizer_hash) {
  if (per_class.empty()) throw InvalidInputError("classifier needs at least one class");
  const int classes = static_cast<int>(per_class.size());
  const int d = per_class.front().feature_dim();
  Eigen::Index n = 0;
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    if (per_class[c].empty()) {
      throw InvalidInputError("classifier dataset for class " + std::to_string(c) + " is empty");
    }
    if (per_class[c].feature_dim() != d) {
      throw DimensionMismatchError("classifier dataset", d, per_class[c].feature_dim());
    }
    n += static_cast<Eigen::Index>(per_class[c].size());
  }

  // Design matrix with a bias column, one-hot targets.
  Eigen::MatrixXd a(n, d + 1);
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(n, classes);
  std::vector<int> label(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (int c = 0; c < classes; ++c) {
    for (const auto& s : per_class[static_cast<std::size_t>(c)].samples()) {
      a.row(row).head(d) = s.observation.features.transpose();
      a(row, d) = 1.0;
      target(row, c) = 1.0;
      label[static_cast<std::size_t>(row)] = c;
      ++row;
    }
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d + 1, classes);
  TrajectoryClassifier clf;
  clf.featurizer_hash = featurizer_hash;
  if (classes > 1) {
    Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(d + 1, classes);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(d + 1, classes);
    const int stride = std::max(1, cfg.record_every);
    for (int t = 1; t <= cfg.epochs; ++t) {
      Eigen::MatrixXd z = a * w;
      z.colwise() -= z.rowwise().maxCoeff();
      Eigen::MatrixXd p = z.array().exp().matrix();
      const Eigen::VectorXd norm = p.rowwise().sum();
      p.array().colwise() /= norm.array();
      if (t % stride == 1 || stride == 1) {
        double loss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) loss -= std::log(std::max(p(i, label[i]), 1e-300));
        clf.loss_trace.push_back(loss / double(n));
      }
      const Eigen::MatrixXd g = a.transpose() * (p - target) / double(n) + cfg.weight_decay * w;
      m1 = 0.9 * m1 + 0.1 * g;
      m2 = 0.999 * m2 + 0.001 * g.cwiseProduct(g);
      const double c1 = 1.0 - std::pow(0.9, t);
      const double c2 = 1.0 - std::pow(0.999, t);
      w.array() -= cfg.rate * (m1.array() / c1) / ((m2.array() / c2).sqrt() + 1e-8);
    }
  }
  clf.head.use_bias = true;
  clf.head.weights = w.topRows(d);
  clf.head.bias = w.row(d).transpose();

  std::vector<int> correct(static_cast<std::size_t>(classes), 0);
  std::vector<int> total(static_cast<std::size_t>(classes), 0);
  const Eigen::MatrixXd logits = a * w;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = label[static_cast<std::size_t>(i)];
    ++total[static_cast<std::size_t>(c)];
    if (static_cast<int>(argmax_first(logits.row(i).transpose())) == c) {
      ++correct[static_cast<std::size_t>(c)];
    }
  }
  for (int c = 0; c < classes; ++c) {
    clf.training_accuracy.push_back(double(correct[static_cast<std::size_t>(c)]) /
                                    double(total[static_cast<std::size_t>(c)]));
  }
  return clf;
}

double ExemplarSet::distance(const Eigen::VectorXd& features) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : exemplars) {
    if (e.size() != features.size()) {
      throw DimensionMismatchError("exemplar observation", e.size(), features.size());
    }
    best = std::min(best, (e - features).norm());
  }
  return best;
}

bool ExemplarSet::matches(const Eigen::VectorXd& features) const {
  return distance(features) <= threshold;
}

ExemplarSet make_exemplar_set(const std::vector<Observation>& observations, double threshold) {
  if (observations.empty()) throw InvalidInputError("exemplar set needs at least one observation");
  if (observations.size() > kMaxExemplars) {
    throw InvalidInputError("exemplar set holds at most " + std::to_string(kMaxExemplars) +
                            " observations");
  }
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw InvalidInputError("exemplar threshold must be positive");
  }
  ExemplarSet set;
  set.threshold = threshold;
  for (const auto& o : observations) {
    if (!set.exemplars.empty() && o.features.size() != set.exemplars.front().size()) {
      throw DimensionMismatchError("exemplar observation", set.exemplars.front().size(),
                                   o.features.size());
    }
    if (!o.features.allFinite()) throw InvalidInputError("non-finite exemplar");
    bool duplicate = false;
    for (const auto& e : set.exemplars) duplicate = duplicate || e == o.features;
    if (!duplicate) set.exemplars.push_back(o.features);
  }
  return set;
}

IntersectionClassifier enroll_intersection(const std::vector<Observation>& observations,
                                           std::size_t from, std::size_t to, double threshold) {
  if (from == to) throw InvalidInputError("intersection must join two different trajectories");
  return {from, to, make_exemplar_set(observations, threshold)};
}

bool detect_intersection(const IntersectionClassifier& h, const Observation& obs) {
  return h.set.matches(obs.features);
}

GoalReacher make_goal_reacher(const std::vector<Observation>& observations, double threshold) {
  return {make_exemplar_set(observations, threshold)};
}

bool goal_reached(const GoalReacher& r, const Observation& obs) {
  return r.set.matches(obs.features);
}

}  // namespace tng
