#include "tng/model_io.hpp"

#include <cstdio>
#include <filesystem>

#include "tng/environment.hpp"
#include "tng/json_util.hpp"

namespace tng {

namespace fs = std::filesystem;

namespace {

constexpr const char* kModelFormat = "tng-model/1";
constexpr const char* kGraphFormat = "tng-graph/1";
constexpr const char* kEpisodeFormat = "tng-episode/1";

json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  }
  return flat;
}

Eigen::MatrixXd matrix_from_json(const json& value, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& path) {
  const Eigen::VectorXd flat = get_vector(value, path);
  if (rows < 0 || cols < 0 || flat.size() != rows * cols) {
    throw DimensionMismatchError(path, static_cast<long>(rows * cols), static_cast<long>(flat.size()));
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat(r * cols + c);
  }
  return m;
}

Eigen::Index get_dim(const json& obj, const char* key, const std::string& path) {
  const std::int64_t v = get_integer(require(obj, key, path), path + "." + key);
  if (v < 1) throw ValidationError("field '" + path + "." + key + "' must be >= 1");
  return static_cast<Eigen::Index>(v);
}

json linear_to_json(const LinearHead& h) {
  return {{"input_dim", h.input_dim()},
          {"output_dim", h.output_dim()},
          {"weights", matrix_to_json(h.weights)},
          {"bias", vector_to_json(h.bias)},
          {"use_bias", h.use_bias}};
}

LinearHead linear_from_json(const json& doc, const std::string& path) {
  LinearHead h;
  const Eigen::Index d = get_dim(doc, "input_dim", path);
  const Eigen::Index k = get_dim(doc, "output_dim", path);
  h.weights = matrix_from_json(require(doc, "weights", path), d, k, path + ".weights");
  h.bias = get_vector(require(doc, "bias", path), path + ".bias");
  if (h.bias.size() != k) throw DimensionMismatchError(path + ".bias", long(k), long(h.bias.size()));
  h.use_bias = get_bool(require(doc, "use_bias", path), path + ".use_bias");
  if (!h.weights.allFinite() || !h.bias.allFinite()) {
    throw ValidationError(path + ": non-finite weights");
  }
  return h;
}

json hash_field(std::uint64_t h) { return hash_to_hex(h); }

std::uint64_t get_hash(const json& doc, const std::string& path) {
  return hash_from_hex(get_string(require(doc, "featurizer_hash", path), path + ".featurizer_hash"));
}

json regression_to_json(const RegressionController& c) {
  json doc;
  doc["format"] = kModelFormat;
  if (const auto* lin = std::get_if<LinearHead>(&c.head)) {
    doc["head"] = "linear";
    doc.update(linear_to_json(*lin));
  } else {
    const MlpHead& m = std::get<MlpHead>(c.head);
    doc["head"] = "mlp";
    doc["sizes"] = m.sizes;
    json layers = json::array();
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      layers.push_back({{"weights", matrix_to_json(m.weights[l])}, {"bias", vector_to_json(m.biases[l])}});
    }
    doc["layers"] = layers;
  }
  doc["lambda"] = c.lambda;
  doc["featurizer_hash"] = hash_field(c.featurizer_hash);
  return doc;
}

RegressionController regression_from_json(const json& doc, const std::string& head) {
  RegressionController c;
  if (head == "linear") {
    LinearHead h = linear_from_json(doc, "");
    if (h.output_dim() != 2) throw DimensionMismatchError("linear head output", 2, h.output_dim());
    c.head = std::move(h);
  } else {
    MlpHead m;
    const json& sizes = require(doc, "sizes", "");
    if (!sizes.is_array() || sizes.size() < 2) throw ParseError("field 'sizes': expected >= 2 layer sizes");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const std::int64_t s = get_integer(sizes[i], "sizes[" + std::to_string(i) + "]");
      if (s < 1) throw ValidationError("layer sizes must be >= 1");
      m.sizes.push_back(static_cast<int>(s));
    }
    if (m.sizes.back() != 2) throw DimensionMismatchError("mlp head output", 2, m.sizes.back());
    const json& layers = require(doc, "layers", "");
    if (!layers.is_array() || layers.size() + 1 != sizes.size()) {
      throw ParseError("field 'layers': expected one entry per weight layer");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string p = "layers[" + std::to_string(l) + "]";
      m.weights.push_back(matrix_from_json(require(layers[l], "weights", p), m.sizes[l + 1],
                                           m.sizes[l], p + ".weights"));
      Eigen::VectorXd b = get_vector(require(layers[l], "bias", p), p + ".bias");
      if (b.size() != m.sizes[l + 1]) throw DimensionMismatchError(p + ".bias", m.sizes[l + 1], b.size());
      if (!m.weights.back().allFinite() || !b.allFinite()) throw ValidationError(p + ": non-finite weights");
      m.biases.push_back(std::move(b));
    }
    c.head = std::move(m);
  }
  c.lambda = get_number(require(doc, "lambda", ""), "lambda");
  c.featurizer_hash = get_hash(doc, "");
  return c;
}

json detection_to_json(const DetectionController& c) {
  const DirectionDetector& d = c.detector;
  json doc = {{"format", kModelFormat}, {"head", "direction-detector"}};
  doc["regressor"] = linear_to_json(d.regressor);
  doc["width"] = d.width;
  doc["shift"] = d.shift;
  doc["deadband"] = d.deadband;
  doc["confidence"] = {{"feature_mean", vector_to_json(d.feature_mean)},
                       {"feature_std", vector_to_json(d.feature_std)},
                       {"distance_scale", d.distance_scale}};
  doc["imbalanced"] = d.imbalanced;
  doc["warning"] = d.warning;
  doc["featurizer_hash"] = hash_field(d.featurizer_hash);
  const PidGains& g = c.pid.gains;
  doc["controller"] = {{"pid", {{"kp", g.kp}, {"ki", g.ki}, {"kd", g.kd},
                                {"integral_limit", g.integral_limit}}},
                       {"cruise_speed", c.cruise_speed},
                       {"confidence_floor", c.confidence_floor}};
  return doc;
}

DetectionController detection_from_json(const json& doc) {
  DetectionController c;
  DirectionDetector& d = c.detector;
  d.regressor = linear_from_json(require(doc, "regressor", ""), "regressor");
  if (d.regressor.output_dim() != 1) {
    throw DimensionMismatchError("direction regressor output", 1, d.regressor.output_dim());
  }
  d.width = get_number(require(doc, "width", ""), "width");
  d.shift = get_number(require(doc, "shift", ""), "shift");
  d.deadband = get_number(require(doc, "deadband", ""), "deadband");
  if (!(d.width > 0.0) || !(d.shift > 0.0) || d.shift > d.width / 2 || !(d.deadband >= 0.0)) {
    throw ValidationError("direction detector: need width > 0, 0 < shift <= width/2, deadband >= 0");
  }
  const json& conf = require(doc, "confidence", "");
  d.feature_mean = get_vector(require(conf, "feature_mean", "confidence"), "confidence.feature_mean");
  d.feature_std = get_vector(require(conf, "feature_std", "confidence"), "confidence.feature_std");
  d.distance_scale = get_number(require(conf, "distance_scale", "confidence"), "confidence.distance_scale");
  if (d.feature_mean.size() != d.input_dim() || d.feature_std.size() != d.input_dim()) {
    throw DimensionMismatchError("confidence statistics", d.input_dim(), d.feature_mean.size());
  }
  if (!(d.distance_scale > 0.0) || (d.feature_std.array() <= 0.0).any()) {
    throw ValidationError("confidence statistics must be positive");
  }
  d.imbalanced = get_bool(require(doc, "imbalanced", ""), "imbalanced");
  d.warning = get_string(require(doc, "warning", ""), "warning");
  d.featurizer_hash = get_hash(doc, "");
  const json& ctl = require(doc, "controller", "");
  const json& pid = require(ctl, "pid", "controller");
  PidGains g;
  g.kp = get_number(require(pid, "kp", "controller.pid"), "controller.pid.kp");
  g.ki = get_number(require(pid, "ki", "controller.pid"), "controller.pid.ki");
  g.kd = get_number(require(pid, "kd", "controller.pid"), "controller.pid.kd");
  g.integral_limit =
      get_number(require(pid, "integral_limit", "controller.pid"), "controller.pid.integral_limit");
  c.pid = PidState{g};
  c.cruise_speed = get_number(require(ctl, "cruise_speed", "controller"), "controller.cruise_speed");
  c.confidence_floor =
      get_number(require(ctl, "confidence_floor", "controller"), "controller.confidence_floor");
  return c;
}

json classifier_to_json(const TrajectoryClassifier& c) {
  json doc = {{"format", kModelFormat}, {"head", "trajectory-classifier"}};
  doc.update(linear_to_json(c.head));
  doc["training_accuracy"] = c.training_accuracy;
  doc["featurizer_hash"] = hash_field(c.featurizer_hash);
  return doc;
}

TrajectoryClassifier classifier_from_json(const json& doc) {
  TrajectoryClassifier c;
  c.head = linear_from_json(doc, "");
  const Eigen::VectorXd acc = get_vector(require(doc, "training_accuracy", ""), "training_accuracy");
  c.training_accuracy.assign(acc.data(), acc.data() + acc.size());
  c.featurizer_hash = get_hash(doc, "");
  return c;
}

json model_to_json(const Model& m) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RegressionController>) return regression_to_json(v);
        else if constexpr (std::is_same_v<T, DetectionController>) return detection_to_json(v);
        else return classifier_to_json(v);
      },
      m);
}

Model model_from_json(const json& doc) {
  check_format(doc, kModelFormat, "model");
  const std::string head = get_string(require(doc, "head", ""), "head");
  if (head == "linear" || head == "mlp") return regression_from_json(doc, head);
  if (head == "direction-detector") return detection_from_json(doc);
  if (head == "trajectory-classifier") return classifier_from_json(doc);
  throw ParseError("model: unknown head type '" + head + "'");
}

json plan_to_json(const Plan& p) {
  return {{"vertices", p.vertices}, {"edges", p.edges}, {"total_weight", p.total_weight}};
}

}  // namespace

std::string hash_to_hex(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t hash_from_hex(const std::string& text) {
  if (text.empty() || text.size() > 16 ||
      text.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    throw ParseError("featurizer hash must be up to 16 hex digits, got '" + text + "'");
  }
  return std::stoull(text, nullptr, 16);
}

const char* model_kind(const Model& m) {
  switch (m.index()) {
    case 0: return "regression";
    case 1: return "detection";
    default: return "classifier";
  }
}

std::string model_head_type(const Model& m) {
  return get_string(model_to_json(m).at("head"), "head");
}

std::string model_to_string(const Model& m) { return model_to_json(m).dump(1) + "\n"; }

Model parse_model(const std::string& text) { return model_from_json(parse_json_text(text, "model")); }

void save_model(const Model& m, const std::string& path) { write_text_file(path, model_to_string(m)); }

Model load_model(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_model(text);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_graph(const TngGraph& graph, const std::string& path) {
  const fs::path file(path);
  const std::string dir_name = file.stem().string() + ".models";
  const fs::path model_dir = file.parent_path() / dir_name;
  std::error_code ec;
  fs::create_directories(model_dir, ec);
  if (ec) throw IoError("cannot create directory '" + model_dir.string() + "': " + ec.message());

  json doc;
  doc["format"] = kGraphFormat;
  doc["feature_dim"] = graph.feature_dim();
  doc["featurizer_hash"] = hash_to_hex(graph.classifier.featurizer_hash);
  json vertices = json::array();
  for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
    const std::string ref = dir_name + "/vertex_" + std::to_string(i) + ".json";
    const Model m = std::visit([](const auto& c) -> Model { return c; }, graph.controllers[i]);
    save_model(m, (file.parent_path() / ref).string());
    json v = {{"index", i}, {"controller", ref}, {"kind", controller_kind(graph.controllers[i])}};
    v["name"] = i < graph.names.size() ? graph.names[i] : "";
    vertices.push_back(v);
  }
  doc["vertices"] = vertices;
  const std::string clf_ref = dir_name + "/classifier.json";
  save_model(Model(graph.classifier), (file.parent_path() / clf_ref).string());
  doc["classifier"] = clf_ref;
  json edges = json::array();
  for (const TngEdge& e : graph.edges) {
    json ex = json::array();
    for (const auto& x : e.classifier.set.exemplars) ex.push_back(vector_to_json(x));
    edges.push_back({{"from", e.from()},
                     {"to", e.to()},
                     {"weight", e.weight},
                     {"point", {e.point.x, e.point.y}},
                     {"threshold", e.classifier.set.threshold},
                     {"exemplars", ex}});
  }
  doc["edges"] = edges;
  write_text_file(path, doc.dump(1) + "\n");
}

TngGraph load_graph(const std::string& path) {
  const json doc = parse_json_text(read_text_file(path), path);
  try {
    check_format(doc, kGraphFormat, "graph");
    const fs::path base = fs::path(path).parent_path();
    const json& vertices = require(doc, "vertices", "");
    if (!vertices.is_array() || vertices.empty()) throw ParseError("field 'vertices': expected a non-empty array");
    std::vector<AnyController> controllers;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const std::string p = "vertices[" + std::to_string(i) + "]";
      const std::string ref = get_string(require(vertices[i], "controller", p), p + ".controller");
      Model m = load_model((base / ref).string());
      if (auto* r = std::get_if<RegressionController>(&m)) controllers.emplace_back(std::move(*r));
      else if (auto* d = std::get_if<DetectionController>(&m)) controllers.emplace_back(std::move(*d));
      else throw ValidationError(p + ": controller file holds a classifier");
      names.push_back(vertices[i].contains("name") ? get_string(vertices[i]["name"], p + ".name") : "");
    }
    const std::string clf_ref = get_string(require(doc, "classifier", ""), "classifier");
    Model clf = load_model((base / clf_ref).string());
    if (!std::holds_alternative<TrajectoryClassifier>(clf)) {
      throw ValidationError("classifier reference does not hold a trajectory classifier");
    }
    const json& edges_doc = require(doc, "edges", "");
    if (!edges_doc.is_array()) throw ParseError("field 'edges': expected an array");
    std::vector<TngEdge> edges;
    for (std::size_t k = 0; k < edges_doc.size(); ++k) {
      const std::string p = "edges[" + std::to_string(k) + "]";
      const json& e = edges_doc[k];
      const json& ex = require(e, "exemplars", p);
      if (!ex.is_array()) throw ParseError("field '" + p + ".exemplars': expected an array");
      std::vector<Observation> obs;
      for (std::size_t j = 0; j < ex.size(); ++j) {
        obs.push_back({get_vector(ex[j], p + ".exemplars[" + std::to_string(j) + "]"), 0.0});
      }
      TngEdge edge;
      edge.classifier = enroll_intersection(obs, get_unsigned(require(e, "from", p), p + ".from"),
                                            get_unsigned(require(e, "to", p), p + ".to"),
                                            get_number(require(e, "threshold", p), p + ".threshold"));
      edge.weight = get_number(require(e, "weight", p), p + ".weight");
      const Eigen::VectorXd pt = get_vector(require(e, "point", p), p + ".point");
      if (pt.size() != 2) throw ParseError("field '" + p + ".point': expected [x, y]");
      edge.point = {pt(0), pt(1)};
      edges.push_back(std::move(edge));
    }
    TngGraph g = build_tng(std::move(controllers), std::get<TrajectoryClassifier>(std::move(clf)),
                           std::move(edges));
    g.names = std::move(names);
    return g;
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string graph_summary(const TngGraph& graph) {
  const BuildReport rep = analyze_reachability(graph.vertex_count(), graph.edges);
  json doc;
  doc["vertices"] = json::array();
  for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
    doc["vertices"].push_back({{"index", i},
                               {"name", i < graph.names.size() ? graph.names[i] : ""},
                               {"controller", controller_kind(graph.controllers[i])}});
  }
  doc["edges"] = json::array();
  for (const TngEdge& e : graph.edges) {
    doc["edges"].push_back({{"from", e.from()},
                            {"to", e.to()},
                            {"weight", e.weight},
                            {"threshold", e.classifier.set.threshold},
                            {"exemplars", e.classifier.set.exemplars.size()}});
  }
  doc["feature_dim"] = graph.feature_dim();
  doc["navigable"] = rep.navigable;
  doc["unreachable"] = json::array();
  for (const auto& [s, d] : rep.unreachable) doc["unreachable"].push_back({s, d});
  return doc.dump(1) + "\n";
}

std::string episode_to_string(const EpisodeLog& log) {
  json doc;
  doc["format"] = kEpisodeFormat;
  doc["outcome"] = outcome_name(log.outcome);
  doc["failure_reason"] = log.failure_reason;
  doc["total_time"] = log.total_time;
  doc["human_time"] = log.human_time;
  doc["autonomous_time"] = log.autonomous_time;
  doc["distance"] = log.distance;
  doc["pa"] = log.total_time > 0.0 ? percentage_autonomy(log) : 100.0;
  doc["abstentions"] = log.abstentions;
  doc["plan"] = plan_to_json(log.plan);
  doc["final_pose"] = pose_to_json(log.final_pose);
  json iv = json::array();
  for (const Intervention& i : log.interventions) {
    iv.push_back({{"start", i.start}, {"end", i.end}, {"trigger", i.trigger}});
  }
  doc["interventions"] = iv;
  json sw = json::array();
  for (const SwitchEvent& s : log.switches) {
    sw.push_back({{"t", s.t}, {"edge", s.edge}, {"from", s.from}, {"to", s.to}, {"pose", pose_to_json(s.pose)}});
  }
  doc["switches"] = sw;
  json ev = json::array();
  for (const EpisodeEvent& e : log.events) ev.push_back({{"t", e.t}, {"kind", e.kind}, {"detail", e.detail}});
  doc["events"] = ev;
  json ticks = json::array();
  for (const TickRecord& r : log.ticks) {
    ticks.push_back({{"t", r.t},
                     {"pose", pose_to_json(r.pose)},
                     {"command", {r.command.linear, r.command.angular}},
                     {"phase", phase_name(r.phase)},
                     {"vertex", r.vertex},
                     {"intervening", r.intervening},
                     {"events", r.events}});
  }
  doc["ticks"] = ticks;
  return doc.dump(1) + "\n";
}

}  // namespace tng
