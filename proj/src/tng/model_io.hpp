#pragma once

#include <string>
#include <variant>

#include "tng/classifiers.hpp"
#include "tng/detection.hpp"
#include "tng/executive.hpp"
#include "tng/graph.hpp"
#include "tng/regression_controller.hpp"

namespace tng {

// Model files: `tng-model/1` JSON with a head type of "linear", "mlp",
// "direction-detector" or "trajectory-classifier". Weight matrices are stored
// as flat row-major arrays next to their shape.
using Model = std::variant<RegressionController, DetectionController, TrajectoryClassifier>;

const char* model_kind(const Model& m);  // "regression", "detection", "classifier"
std::string model_head_type(const Model& m);

std::string model_to_string(const Model& m);
Model parse_model(const std::string& text);
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

// Graph files: `tng-graph/1` JSON that refers to one model file per vertex
// plus the trajectory classifier, by paths relative to the graph file. The
// edges carry their exemplar feature arrays inline. `save_graph` writes the
// model files into `<stem>.models/` beside the graph file.
void save_graph(const TngGraph& graph, const std::string& path);
TngGraph load_graph(const std::string& path);

// Human-readable JSON summary of a graph (vertices, edges, reachability).
std::string graph_summary(const TngGraph& graph);

// Episode logs: `tng-episode/1` JSON.
std::string episode_to_string(const EpisodeLog& log);

std::string hash_to_hex(std::uint64_t h);
std::uint64_t hash_from_hex(const std::string& text);

}  // namespace tng
