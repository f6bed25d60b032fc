#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "tng/dataset.hpp"
#include "tng/ridge.hpp"

namespace tng {

// One shared linear-softmax head over C trajectory classes.
struct TrajectoryClassifier {
  LinearHead head;  // d -> C
  std::uint64_t featurizer_hash = 0;
  std::vector<double> training_accuracy;  // per class
  std::vector<double> loss_trace;

  int classes() const { return head.output_dim(); }
  int input_dim() const { return head.input_dim(); }
};

struct ClassifierTrainConfig {
  double rate = 0.05;
  int epochs = 1000;
  double weight_decay = 1e-5;
  int record_every = 50;
};

TrajectoryClassifier train_trajectory_classifier(const std::vector<Dataset>& per_class,
                                                 const ClassifierTrainConfig& cfg,
                                                 std::uint64_t featurizer_hash);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
// Index of the largest entry; the smallest index wins ties.
std::size_t argmax_first(const Eigen::VectorXd& v);

struct Classification {
  std::size_t index = 0;
  std::vector<int> indicator;  // g_i: one at `index`, zero elsewhere
  Eigen::VectorXd probabilities;
};

Classification classify_logits(const Eigen::VectorXd& logits);
Classification classify_trajectory(const TrajectoryClassifier& clf, const Observation& obs);

inline constexpr std::size_t kMaxExemplars = 10;

// Nearest-exemplar recogniser: fires when the closest stored observation lies
// within `threshold` (Euclidean feature distance, inclusive).
struct ExemplarSet {
  std::vector<Eigen::VectorXd> exemplars;
  double threshold = 0.0;

  double distance(const Eigen::VectorXd& features) const;
  bool matches(const Eigen::VectorXd& features) const;
};

struct IntersectionClassifier {
  std::size_t from = 0;
  std::size_t to = 0;
  ExemplarSet set;
};

// 1 to 10 distinct exemplars; exact duplicates are dropped.
ExemplarSet make_exemplar_set(const std::vector<Observation>& observations, double threshold);
IntersectionClassifier enroll_intersection(const std::vector<Observation>& observations,
                                           std::size_t from, std::size_t to, double threshold);
bool detect_intersection(const IntersectionClassifier& h, const Observation& obs);

struct GoalReacher {
  ExemplarSet set;
};

GoalReacher make_goal_reacher(const std::vector<Observation>& observations, double threshold);
bool goal_reached(const GoalReacher& r, const Observation& obs);

}  // namespace tng
