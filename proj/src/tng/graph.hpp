#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tng/classifiers.hpp"
#include "tng/detection.hpp"
#include "tng/regression_controller.hpp"

namespace tng {

using AnyController = std::variant<RegressionController, DetectionController>;

int controller_input_dim(const AnyController& c);
const char* controller_kind(const AnyController& c);

struct TngEdge {
  IntersectionClassifier classifier;  // carries from/to vertex ids
  double weight = 1.0;                // metres (or hops)
  Vec2 point;                         // informational crossing location

  std::size_t from() const { return classifier.from; }
  std::size_t to() const { return classifier.to; }
};

struct TngGraph {
  std::vector<AnyController> controllers;  // vertex i drives trajectory i
  TrajectoryClassifier classifier;
  std::vector<TngEdge> edges;
  std::vector<std::string> names;  // optional vertex labels

  std::size_t vertex_count() const { return controllers.size(); }
  int feature_dim() const { return classifier.input_dim(); }
};

struct BuildReport {
  bool navigable = false;
  std::vector<std::pair<std::size_t, std::size_t>> unreachable;  // ordered (src, dst)
};

// Validates vertex and edge references, weights and dimensions.
TngGraph build_tng(std::vector<AnyController> controllers, TrajectoryClassifier classifier,
                   std::vector<TngEdge> edges, BuildReport* report = nullptr);

BuildReport analyze_reachability(std::size_t vertex_count, const std::vector<TngEdge>& edges);

struct WeightedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 1.0;
};

struct Plan {
  std::vector<std::size_t> vertices;
  std::vector<std::size_t> edges;  // indices into the edge list, in travel order
  double total_weight = 0.0;
};

// Minimum-weight directed path by Dijkstra. Among equally short paths the
// lexicographically smallest vertex sequence wins; parallel edges resolve to
// the lightest, then the lowest index. Throws NoPathError if dst is unreachable.
Plan plan_path(std::size_t vertex_count, const std::vector<WeightedEdge>& edges, std::size_t src,
               std::size_t dst);
Plan plan(const TngGraph& g, std::size_t src, std::size_t dst);

struct Localization {
  std::size_t vertex = 0;
  std::vector<std::size_t> firing_edges;
};

Localization localize(const TngGraph& g, const Observation& obs);
std::size_t identify_goal(const TngGraph& g, const Observation& goal_obs);

}  // namespace tng
