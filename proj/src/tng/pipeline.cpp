#include "tng/pipeline.hpp"

#include <cmath>
#include <limits>

#include "tng/error.hpp"

namespace tng {

namespace {

CollectConfig seeded(CollectConfig c, std::uint64_t seed) {
  c.seed = seed;
  return c;
}

struct Demonstrations {
  Dataset expert;
  Dataset combined;  // expert + shift augmentation
  std::size_t skipped = 0;
};

Demonstrations gather(const Environment& env, std::size_t traj_index,
                      const ControllerTrainConfig& cfg) {
  CollectResult collected =
      collect_demonstrations(env, traj_index, seeded(cfg.collect, mix_seed(cfg.seed, 1)));
  if (collected.aborted) {
    throw Error(ErrorCode::ExpertLost, "collection on trajectory " +
                                           std::to_string(env.trajectory(traj_index).id()) +
                                           " failed: " + collected.message);
  }
  Demonstrations d;
  d.expert = collected.data;
  d.combined = collected.data;
  if (cfg.augment) {
    AugmentResult aug =
        augment_dataset(collected.data, env, cfg.collect.expert, cfg.shift, mix_seed(cfg.seed, 2));
    d.combined.append(aug.data);
    d.skipped = aug.skipped;
  }
  return d;
}

}  // namespace

TrainedRegression train_regression_pipeline(const Environment& env, std::size_t traj_index,
                                            const ControllerTrainConfig& cfg,
                                            const IterationCallback& on_iteration) {
  if (cfg.dagger_iterations < 0) throw InvalidInputError("dagger iterations must be >= 0");
  Demonstrations demos = gather(env, traj_index, cfg);
  const std::uint64_t hash = env.featurizer().hash();
  TrainedRegression out;
  out.expert = demos.expert;
  out.augmentation_skipped = demos.skipped;
  Dataset data = std::move(demos.combined);
  out.controller = train_regression(data, cfg.regression, hash);
  if (on_iteration) on_iteration(0, out.controller);

  const Trajectory& traj = env.trajectory(traj_index);
  for (int it = 1; it <= cfg.dagger_iterations; ++it) {
    DaggerConfig dc;
    dc.iteration = it;
    dc.steps = steps_for_laps(traj, cfg.dagger_laps, cfg.collect.expert, cfg.collect.dt);
    dc.dt = cfg.collect.dt;
    dc.expert = cfg.collect.expert;
    dc.max_deviation = cfg.dagger_max_deviation;
    dc.seed = mix_seed(cfg.seed, 100 + it);
    if (traj.closed()) {
      NoiseStream start(mix_seed(cfg.seed, 200 + it));
      dc.start_arc = start.uniform(0.0, traj.length());
    }
    DaggerResult r = dagger_iterate(out.controller, env, traj_index, data, dc);
    data = std::move(r.data);
    out.controller = train_regression(data, cfg.regression, hash);
    out.dagger.push_back({it, data.size(), r.rollout_steps, r.truncated, r.reason});
    if (on_iteration) on_iteration(it, out.controller);
  }
  out.training = std::move(data);
  return out;
}

DetectionController train_detection_pipeline(const Environment& env, std::size_t traj_index,
                                             const ControllerTrainConfig& cfg, Dataset* training) {
  Demonstrations demos = gather(env, traj_index, cfg);
  DetectionController c;
  c.detector = train_detector(demos.combined, cfg.detector, env.featurizer().hash());
  c.pid = PidState{cfg.pid};
  c.cruise_speed = cfg.collect.expert.cruise_speed;
  c.confidence_floor = cfg.confidence_floor;
  if (training) *training = std::move(demos.combined);
  return c;
}

namespace {

double side_radius(const Environment& env, const Trajectory& traj, double arc, double offset) {
  const Featurizer& f = env.featurizer();
  return (f.encode(traj.pose_at(arc + offset)) - f.encode(traj.pose_at(arc))).norm();
}

}  // namespace

double window_radius(const Environment& env, const Trajectory& traj, double arc, double window) {
  const Featurizer& f = env.featurizer();
  const Eigen::VectorXd centre = f.encode(traj.pose_at(arc));
  double r = 0.0;
  for (double s : {-window, window}) {
    r = std::max(r, (f.encode(traj.pose_at(arc + s)) - centre).norm());
  }
  return r;
}

double exemplar_threshold(double radius, int feature_dim, double noise_sigma) {
  // A live observation and an exemplar each carry independent noise; the
  // squared distance between them grows by about 2 d sigma^2.
  const double noise = 2.0 * feature_dim * noise_sigma * noise_sigma;
  return std::max(std::sqrt(radius * radius + noise), 1e-9);
}

Observation capture(const Environment& env, const Pose& pose, int captures, NoiseStream& stream) {
  if (captures < 1) throw InvalidInputError("capture count must be >= 1");
  Observation obs = env.observe(pose, stream);
  for (int k = 1; k < captures; ++k) obs.features += env.observe(pose, stream).features;
  obs.features /= double(captures);
  return obs;
}

std::vector<TngEdge> enroll_environment_edges(const Environment& env, const GraphBuildConfig& cfg,
                                              NoiseStream& stream) {
  const int dim = env.featurizer().feature_dim();
  const double sigma = env.featurizer_config().noise_sigma;
  const std::uint64_t base_seed = stream.next_u64();
  std::vector<TngEdge> edges;
  for (const Intersection& x : env.intersections()) {
    const Trajectory& from = env.trajectory(x.from_index);
    const Trajectory& to = env.trajectory(x.to_index);
    // Both directions of a crossing share one exemplar set, so the pair is
    // ordered canonically and the capture stream is keyed on the crossing.
    const bool forward = x.from_index < x.to_index;
    const Trajectory& a = forward ? from : to;
    const Trajectory& b = forward ? to : from;
    const double arc_a = forward ? x.from_arc : x.to_arc;
    const double arc_b = forward ? x.to_arc : x.from_arc;
    const Pose pa{x.point.x, x.point.y, a.heading_at(arc_a)};
    const Pose pb{x.point.x, x.point.y, b.heading_at(arc_b)};
    const auto key = static_cast<std::uint64_t>(std::llround(x.point.x * 1e4) * 1000003 +
                                                std::llround(x.point.y * 1e4));
    NoiseStream local(mix_seed(base_seed, key));
    std::vector<Observation> shots{capture(env, pa, cfg.exemplar_captures, local),
                                   capture(env, pb, cfg.exemplar_captures, local)};
    // The tightest one-sided radius keeps the firing band inside the window
    // on both trajectories and on both sides of the crossing.
    double radius = std::numeric_limits<double>::infinity();
    for (const auto& [t, arc] : {std::pair{&a, arc_a}, std::pair{&b, arc_b}}) {
      for (double s : {-cfg.window, cfg.window}) {
        radius = std::min(radius, side_radius(env, *t, arc, s));
      }
    }
    TngEdge e;
    e.classifier = enroll_intersection(shots, x.from_index, x.to_index,
                                       exemplar_threshold(radius, dim, sigma));
    e.weight = cfg.weights == WeightMode::Hops ? 1.0 : std::max(x.from_arc, 1e-3);
    e.point = x.point;
    edges.push_back(std::move(e));
  }
  return edges;
}

NavigationBuild assemble_navigation_graph(const Environment& env,
                                          std::vector<AnyController> controllers,
                                          TrajectoryClassifier classifier,
                                          const GraphBuildConfig& cfg) {
  NoiseStream stream(mix_seed(cfg.seed, env.noise_seed() ^ 0xed6e));
  std::vector<TngEdge> edges = enroll_environment_edges(env, cfg, stream);
  NavigationBuild out;
  out.graph = build_tng(std::move(controllers), std::move(classifier), std::move(edges), &out.report);
  for (const auto& t : env.trajectories()) out.graph.names.push_back(t.name());
  return out;
}

NavigationBuild build_navigation_graph(const Environment& env, const GraphBuildConfig& cfg) {
  std::vector<AnyController> controllers;
  std::vector<Dataset> class_data;
  std::vector<TrainedRegression> details;
  for (std::size_t i = 0; i < env.trajectories().size(); ++i) {
    ControllerTrainConfig tc = cfg.training;
    tc.seed = mix_seed(cfg.seed, 1000 + i);
    if (cfg.controller == ControllerKind::Regression) {
      TrainedRegression r = train_regression_pipeline(env, i, tc);
      controllers.emplace_back(r.controller);
      // Classifier data: expert laps plus shifted samples (DAgger states excluded).
      Dataset cls(r.training.feature_dim());
      for (const auto& s : r.training.samples()) {
        if (s.source == kSourceExpertLap || s.source == kSourceAugmentation) cls.add(s);
      }
      class_data.push_back(std::move(cls));
      details.push_back(std::move(r));
    } else {
      Dataset training;
      controllers.emplace_back(train_detection_pipeline(env, i, tc, &training));
      class_data.push_back(std::move(training));
    }
  }
  TrajectoryClassifier clf =
      train_trajectory_classifier(class_data, cfg.classifier, env.featurizer().hash());
  NavigationBuild out = assemble_navigation_graph(env, std::move(controllers), std::move(clf), cfg);
  out.regression_details = std::move(details);
  return out;
}

SampledPose sample_pose(const Environment& env, std::size_t traj_index, double min_clearance,
                        NoiseStream& stream, int attempts) {
  const Trajectory& traj = env.trajectory(traj_index);
  SampledPose best;
  best.clearance = -1.0;
  for (int k = 0; k < std::max(1, attempts); ++k) {
    const double arc = stream.uniform(0.0, traj.length());
    const Pose p = traj.pose_at(arc);
    double clearance = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < env.trajectories().size(); ++j) {
      if (j != traj_index) clearance = std::min(clearance, cross_track(p, env.trajectory(j)).distance);
    }
    if (clearance > best.clearance) best = {p, arc, clearance};
    if (clearance >= min_clearance) return {p, arc, clearance};
  }
  return best;
}

GoalReacher make_goal_reacher_for(const Environment& env, std::size_t traj_index,
                                  const SampledPose& goal, const Observation& goal_obs,
                                  double window) {
  const double radius = window_radius(env, env.trajectory(traj_index), goal.arc, window);
  return make_goal_reacher({goal_obs}, exemplar_threshold(radius, env.featurizer().feature_dim(),
                                                          env.featurizer_config().noise_sigma));
}

}  // namespace tng
