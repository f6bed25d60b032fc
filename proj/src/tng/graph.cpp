#include "tng/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "tng/environment.hpp"
#include "tng/error.hpp"

namespace tng {

int controller_input_dim(const AnyController& c) {
  if (const auto* r = std::get_if<RegressionController>(&c)) return r->input_dim();
  return std::get<DetectionController>(c).detector.input_dim();
}

const char* controller_kind(const AnyController& c) {
  return std::holds_alternative<RegressionController>(c) ? "regression" : "detection";
}

BuildReport analyze_reachability(std::size_t vertex_count, const std::vector<TngEdge>& edges) {
  BuildReport report;
  std::vector<std::vector<std::size_t>> adj(vertex_count);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& e : edges) {
    adj[e.from()].push_back(e.to());
    pairs.emplace_back(e.from(), e.to());
  }
  for (std::size_t s = 0; s < vertex_count; ++s) {
    std::vector<char> seen(vertex_count, 0);
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    for (std::size_t t = 0; t < vertex_count; ++t) {
      if (!seen[t]) report.unreachable.emplace_back(s, t);
    }
  }
  report.navigable = report.unreachable.empty();
  return report;
}

TngGraph build_tng(std::vector<AnyController> controllers, TrajectoryClassifier classifier,
                   std::vector<TngEdge> edges, BuildReport* report) {
  const std::size_t c = controllers.size();
  if (c == 0) throw ValidationError("graph needs at least one vertex");
  if (classifier.classes() != static_cast<int>(c)) {
    throw ValidationError("trajectory classifier has " + std::to_string(classifier.classes()) +
                          " classes but the graph has " + std::to_string(c) + " vertices");
  }
  const int dim = classifier.input_dim();
  for (std::size_t i = 0; i < c; ++i) {
    if (controller_input_dim(controllers[i]) != dim) {
      throw DimensionMismatchError("controller " + std::to_string(i), dim,
                                   controller_input_dim(controllers[i]));
    }
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const TngEdge& e = edges[k];
    const std::string where = "edge " + std::to_string(k);
    if (e.from() >= c || e.to() >= c) throw ValidationError(where + " references a missing vertex");
    if (e.from() == e.to()) throw ValidationError(where + " is a self loop");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw ValidationError(where + " has a non-positive weight");
    }
    if (e.classifier.set.exemplars.empty() || !(e.classifier.set.threshold > 0.0)) {
      throw ValidationError(where + " has no usable intersection classifier");
    }
    for (const auto& x : e.classifier.set.exemplars) {
      if (x.size() != dim) throw DimensionMismatchError(where + " exemplar", dim, x.size());
    }
  }
  TngGraph g;
  g.controllers = std::move(controllers);
  g.classifier = std::move(classifier);
  g.edges = std::move(edges);
  if (report) *report = analyze_reachability(c, g.edges);
  return g;
}

Plan plan_path(std::size_t vertex_count, const std::vector<WeightedEdge>& edges, std::size_t src,
               std::size_t dst) {
  if (src >= vertex_count || dst >= vertex_count) {
    throw InvalidInputError("plan: vertex out of range");
  }
  for (const auto& e : edges) {
    if (e.from >= vertex_count || e.to >= vertex_count) {
      throw InvalidInputError("plan: edge references a missing vertex");
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InvalidInputError("plan: edge weights must be positive");
    }
  }
  Plan p;
  p.vertices.push_back(src);
  if (src == dst) return p;

  // Dijkstra on the reversed graph gives every vertex its distance to dst.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::size_t>> incoming(vertex_count);
  std::vector<std::vector<std::size_t>> outgoing(vertex_count);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    incoming[edges[k].to].push_back(k);
    outgoing[edges[k].from].push_back(k);
  }
  std::vector<double> dist(vertex_count, inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[dst] = 0.0;
  queue.push({0.0, dst});
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (std::size_t k : incoming[v]) {
      const std::size_t u = edges[k].from;
      const double nd = d + edges[k].weight;
      if (nd < dist[u]) {
        dist[u] = nd;
        queue.push({nd, u});
      }
    }
  }
  if (!std::isfinite(dist[src])) {
    throw NoPathError("no path from vertex " + std::to_string(src) + " to vertex " +
                      std::to_string(dst));
  }

  // Walk forward along tight edges, always taking the smallest next vertex.
  auto tight = [&](std::size_t k) {
    const WeightedEdge& e = edges[k];
    if (!std::isfinite(dist[e.to])) return false;
    const double via = e.weight + dist[e.to];
    return std::abs(via - dist[e.from]) <= 1e-12 * std::max(1.0, dist[e.from]);
  };
  std::size_t v = src;
  while (v != dst) {
    std::size_t best = edges.size();
    for (std::size_t k : outgoing[v]) {
      if (!tight(k)) continue;
      if (best == edges.size()) {
        best = k;
        continue;
      }
      const WeightedEdge& e = edges[k];
      const WeightedEdge& b = edges[best];
      if (e.to < b.to || (e.to == b.to && e.weight < b.weight)) best = k;
    }
    if (best == edges.size() || p.vertices.size() > vertex_count) {
      throw Error(ErrorCode::Runtime, "plan: failed to reconstruct the shortest path");
    }
    p.edges.push_back(best);
    p.total_weight += edges[best].weight;
    v = edges[best].to;
    p.vertices.push_back(v);
  }
  return p;
}

Plan plan(const TngGraph& g, std::size_t src, std::size_t dst) {
  std::vector<WeightedEdge> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.push_back({e.from(), e.to(), e.weight});
  return plan_path(g.vertex_count(), edges, src, dst);
}

Localization localize(const TngGraph& g, const Observation& obs) {
  Localization loc;
  loc.vertex = classify_trajectory(g.classifier, obs).index;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    if (detect_intersection(g.edges[k].classifier, obs)) loc.firing_edges.push_back(k);
  }
  return loc;
}

std::size_t identify_goal(const TngGraph& g, const Observation& goal_obs) {
  return classify_trajectory(g.classifier, goal_obs).index;
}

}  // namespace tng
