#include "tng/run_config.hpp"

#include <set>

#include "tng/json_util.hpp"

namespace tng {

namespace {

// Reads optional fields of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ParseError("config field '" + path_ + "': expected object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ValidationError("config: unknown key '" + full(it.key()) + "'");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }
  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) out = get_number(*v, full(key));
  }
  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) out = static_cast<int>(get_integer(*v, full(key)));
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) out = get_bool(*v, full(key));
  }
  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) out = get_string(*v, full(key));
  }
  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_expert(Section& s, ExpertConfig& e) {
  s.number("lookahead", e.lookahead);
  s.number("cruise_speed", e.cruise_speed);
  s.number("max_angular", e.max_angular);
  s.number("lost_distance", e.lost_distance);
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  const json doc = parse_json_text(text, "config");
  RunConfig cfg;
  ControllerTrainConfig& tc = cfg.graph.training;
  Section root(doc, "");
  if (const json* v = root.find("seed")) {
    cfg.seed = get_unsigned(*v, "seed");
    cfg.has_seed = true;
  }
  root.find("paths");  // consumed by the CLI
  if (const json* v = root.find("collect")) {
    Section s(*v, "collect");
    s.integer("laps", tc.collect.laps);
    s.number("dt", tc.collect.dt);
  }
  if (const json* v = root.find("expert")) {
    Section s(*v, "expert");
    read_expert(s, tc.collect.expert);
  }
  if (const json* v = root.find("augment")) {
    Section s(*v, "augment");
    s.boolean("enabled", tc.augment);
    s.number("max_lateral", tc.shift.max_lateral);
    s.number("max_rotation", tc.shift.max_rotation);
    s.integer("copies", tc.shift.copies);
  }
  if (const json* v = root.find("regression")) {
    Section s(*v, "regression");
    RegressionTrainConfig& r = tc.regression;
    s.number("lambda", r.lambda);
    std::string head;
    s.text("head", head);
    if (head == "linear") r.head = HeadKind::Linear;
    else if (head == "mlp") r.head = HeadKind::Mlp;
    else if (!head.empty()) throw ValidationError("config: regression.head must be 'linear' or 'mlp'");
    std::string opt;
    s.text("optimizer", opt);
    if (opt == "closed-form") r.optimizer = Optimizer::ClosedForm;
    else if (opt == "adam") r.optimizer = Optimizer::Adam;
    else if (opt == "momentum") r.optimizer = Optimizer::Momentum;
    else if (!opt.empty()) {
      throw ValidationError("config: regression.optimizer must be closed-form, adam or momentum");
    }
    s.number("rate", r.gradient.rate);
    s.integer("steps", r.gradient.steps);
    s.integer("batch", r.gradient.batch);
    s.boolean("cosine_decay", r.gradient.cosine_decay);
    if (const json* h = s.find("hidden")) {
      if (!h->is_array()) throw ParseError("config field 'regression.hidden': expected array");
      r.hidden.clear();
      for (const auto& x : *h) r.hidden.push_back(static_cast<int>(get_integer(x, "regression.hidden")));
    }
  }
  if (const json* v = root.find("dagger")) {
    Section s(*v, "dagger");
    s.integer("iterations", tc.dagger_iterations);
    s.number("laps", tc.dagger_laps);
    s.number("max_deviation", tc.dagger_max_deviation);
  }
  if (const json* v = root.find("detector")) {
    Section s(*v, "detector");
    s.number("width", tc.detector.width);
    s.number("shift", tc.detector.shift);
    s.number("deadband", tc.detector.deadband);
    s.number("lambda", tc.detector.lambda);
    s.number("training_confidence", tc.detector.training_confidence);
  }
  if (const json* v = root.find("pid")) {
    Section s(*v, "pid");
    s.number("kp", tc.pid.kp);
    s.number("ki", tc.pid.ki);
    s.number("kd", tc.pid.kd);
    s.number("integral_limit", tc.pid.integral_limit);
  }
  root.number("confidence_floor", tc.confidence_floor);
  if (const json* v = root.find("classifier")) {
    Section s(*v, "classifier");
    s.number("rate", cfg.graph.classifier.rate);
    s.integer("epochs", cfg.graph.classifier.epochs);
    s.number("weight_decay", cfg.graph.classifier.weight_decay);
  }
  if (const json* v = root.find("graph")) {
    Section s(*v, "graph");
    std::string kind;
    s.text("controller", kind);
    if (kind == "regression") cfg.graph.controller = ControllerKind::Regression;
    else if (kind == "detection") cfg.graph.controller = ControllerKind::Detection;
    else if (!kind.empty()) throw ValidationError("config: graph.controller must be regression or detection");
    std::string weights;
    s.text("weights", weights);
    if (weights == "arc") cfg.graph.weights = WeightMode::Arc;
    else if (weights == "hops") cfg.graph.weights = WeightMode::Hops;
    else if (!weights.empty()) throw ValidationError("config: graph.weights must be arc or hops");
    s.number("window", cfg.graph.window);
    s.integer("exemplar_captures", cfg.graph.exemplar_captures);
  }
  if (const json* v = root.find("supervisor")) {
    Section s(*v, "supervisor");
    s.number("max_cross_track", cfg.supervisor.max_cross_track);
    s.number("max_heading_error", cfg.supervisor.max_heading_error);
    s.number("grace", cfg.supervisor.grace);
    s.number("recover_to", cfg.supervisor.recover_to);
  }
  cfg.supervisor.recovery = tc.collect.expert;
  if (const json* v = root.find("laps")) {
    Section s(*v, "laps");
    s.integer("laps", cfg.laps.laps);
    s.number("step_budget_factor", cfg.laps.step_budget_factor);
    s.number("start_arc", cfg.laps.start_arc);
  }
  cfg.laps.dt = tc.collect.dt;
  cfg.laps.supervisor = cfg.supervisor;
  EpisodeConfig& ep = cfg.matrix.episode;
  if (const json* v = root.find("episode")) {
    Section s(*v, "episode");
    s.number("timeout", ep.executive.timeout);
    s.number("min_switch_interval", ep.executive.min_switch_interval);
    s.boolean("supervise", ep.supervise);
    s.boolean("record_ticks", ep.record_ticks);
  }
  ep.executive.dt = tc.collect.dt;
  ep.supervisor = cfg.supervisor;
  if (const json* v = root.find("matrix")) {
    Section s(*v, "matrix");
    s.number("start_clearance", cfg.matrix.start_clearance);
    s.number("goal_window", cfg.matrix.goal_window);
    s.integer("goal_captures", cfg.matrix.goal_captures);
    s.integer("jobs", cfg.matrix.jobs);
  }
  if (const json* v = root.find("degradation")) {
    Section s(*v, "degradation");
    if (const json* m = s.find("magnitudes")) {
      const Eigen::VectorXd mags = get_vector(*m, "degradation.magnitudes");
      cfg.degradation.magnitudes.assign(mags.data(), mags.data() + mags.size());
    }
  }
  cfg.degradation.laps = cfg.laps;

  validate(tc.collect.expert);
  validate(cfg.supervisor);
  if (tc.collect.laps < 1) throw ValidationError("config: collect.laps must be >= 1");
  if (!(tc.collect.dt > 0.0)) throw ValidationError("config: collect.dt must be positive");
  if (!(tc.regression.lambda > 0.0)) throw ValidationError("config: regression.lambda must be positive");
  if (tc.dagger_iterations < 0) throw ValidationError("config: dagger.iterations must be >= 0");
  if (cfg.laps.laps < 1) throw ValidationError("config: laps.laps must be >= 1");
  if (cfg.matrix.jobs < 1) throw ValidationError("config: matrix.jobs must be >= 1");
  for (double m : cfg.degradation.magnitudes) {
    if (!(m >= 0.0)) throw ValidationError("config: degradation magnitudes must be >= 0");
  }
  if (cfg.has_seed) apply_seed(cfg, cfg.seed);
  return cfg;
}

void apply_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.has_seed = true;
  cfg.graph.seed = seed;
  cfg.graph.training.seed = seed;
  cfg.graph.training.collect.seed = seed;
  cfg.laps.seed = seed;
  cfg.matrix.seed = seed;
  cfg.degradation.seed = seed;
  cfg.degradation.laps.seed = seed;
}

}  // namespace tng
