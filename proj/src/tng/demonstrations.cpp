#include "tng/demonstrations.hpp"

#include <cmath>

#include "tng/error.hpp"

namespace tng {

ProgressTracker::ProgressTracker(const Trajectory& traj, const Pose& start)
    : traj_(&traj), arc_(cross_track(start, traj).arc_position) {}

double ProgressTracker::update(const Pose& pose) {
  const double arc = cross_track(pose, *traj_).arc_position;
  progress_ += traj_->arc_delta(arc_, arc);
  arc_ = arc;
  return progress_;
}

int steps_for_laps(const Trajectory& traj, double laps, const ExpertConfig& expert, double dt) {
  return std::max(1, static_cast<int>(std::ceil(laps * traj.length() / (expert.cruise_speed * dt))));
}

CollectResult collect_demonstrations(const Environment& env, std::size_t traj_index,
                                     const CollectConfig& cfg) {
  if (cfg.laps < 1) throw InvalidInputError("collect: laps must be >= 1");
  if (!(cfg.dt > 0.0)) throw InvalidInputError("collect: dt must be positive");
  validate(cfg.expert);
  const Trajectory& traj = env.trajectory(traj_index);
  NoiseStream stream(mix_seed(cfg.seed, env.noise_seed()));

  CollectResult out;
  out.data = Dataset(env.featurizer().feature_dim());
  // Generous budget: a lap normally takes L / (v dt) steps.
  const int budget = 4 * steps_for_laps(traj, 1.0, cfg.expert, cfg.dt) + 100;
  const double end_tol = 1e-6;

  for (int lap = 0; lap < cfg.laps; ++lap) {
    // Closed loops continue from where the last lap ended; open paths restart.
    Pose pose = (traj.closed() && !out.lap_end_poses.empty()) ? out.lap_end_poses.back()
                                                              : traj.pose_at(0.0);
    ProgressTracker tracker(traj, pose);
    double t = out.data.empty() ? 0.0 : out.data.samples().back().observation.timestamp + cfg.dt;
    bool finished = false;
    for (int k = 0; k < budget; ++k) {
      const auto cmd = try_expert_command(pose, traj, cfg.expert);
      if (!cmd) {
        out.aborted = true;
        out.message = "expert lost during lap " + std::to_string(lap + 1);
        return out;
      }
      DemoSample s;
      s.observation = env.observe(pose, stream, t);
      s.command = *cmd;
      s.pose = pose;
      s.trajectory_id = traj.id();
      s.source = kSourceExpertLap;
      out.data.add(std::move(s));
      pose = step_unicycle(pose, *cmd, cfg.dt);
      t += cfg.dt;
      tracker.update(pose);
      const bool done = traj.closed()
                            ? tracker.progress() >= traj.length()
                            : cross_track(pose, traj).arc_position >= traj.length() - end_tol;
      if (done) {
        finished = true;
        break;
      }
    }
    if (!finished) {
      out.aborted = true;
      out.message = "lap " + std::to_string(lap + 1) + " exceeded its step budget";
      return out;
    }
    out.lap_end_poses.push_back(pose);
    ++out.laps_completed;
  }
  return out;
}

std::optional<DemoSample> augment_shift(const DemoSample& sample, double lateral,
                                        double rotational, const Environment& env,
                                        const ExpertConfig& expert, NoiseStream& stream,
                                        const ShiftConfig& bounds) {
  if (!std::isfinite(lateral) || !std::isfinite(rotational) ||
      std::abs(lateral) > bounds.max_lateral || std::abs(rotational) > bounds.max_rotation) {
    throw InvalidInputError("augment_shift: shift outside the configured bounds");
  }
  const auto idx = env.index_of(sample.trajectory_id);
  if (!idx) {
    throw InvalidInputError("augment_shift: unknown trajectory id " +
                            std::to_string(sample.trajectory_id));
  }
  const Pose& p = sample.pose;
  const Pose q{p.x - lateral * std::sin(p.theta), p.y + lateral * std::cos(p.theta),
               normalize_angle(p.theta + rotational)};
  if (!env.bounds().contains(q.position())) return std::nullopt;
  const auto cmd = try_expert_command(q, env.trajectory(*idx), expert);
  if (!cmd) return std::nullopt;
  DemoSample out;
  out.observation = env.observe(q, stream, sample.observation.timestamp);
  out.command = *cmd;
  out.pose = q;
  out.trajectory_id = sample.trajectory_id;
  out.source = kSourceAugmentation;
  return out;
}

AugmentResult augment_dataset(const Dataset& base, const Environment& env,
                              const ExpertConfig& expert, const ShiftConfig& cfg,
                              std::uint64_t seed) {
  if (cfg.copies < 0) throw InvalidInputError("augment: copies must be >= 0");
  NoiseStream stream(mix_seed(seed, env.noise_seed() ^ 0xa5a5));
  AugmentResult out;
  out.data = Dataset(base.feature_dim());
  for (const auto& s : base.samples()) {
    for (int c = 0; c < cfg.copies; ++c) {
      const double lateral = stream.uniform(-cfg.max_lateral, cfg.max_lateral);
      const double rotation = stream.uniform(-cfg.max_rotation, cfg.max_rotation);
      auto shifted = augment_shift(s, lateral, rotation, env, expert, stream, cfg);
      if (shifted) {
        out.data.add(std::move(*shifted));
      } else {
        ++out.skipped;
      }
    }
  }
  return out;
}

Dataset augment_feature_noise(const Dataset& base, double sigma, int copies, std::uint64_t seed) {
  if (!(sigma >= 0.0) || copies < 0) throw InvalidInputError("feature-noise augmentation: bad parameters");
  NoiseStream stream(seed);
  Dataset out(base.feature_dim());
  for (const auto& s : base.samples()) {
    for (int c = 0; c < copies; ++c) {
      DemoSample n = s;
      for (Eigen::Index i = 0; i < n.observation.features.size(); ++i) {
        n.observation.features(i) += sigma * stream.gaussian();
      }
      n.source = kSourceAugmentation;
      out.add(std::move(n));
    }
  }
  return out;
}

Dataset augment_dropout(const Dataset& base, double fraction, int copies, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0) || copies < 0) {
    throw InvalidInputError("dropout augmentation: bad parameters");
  }
  NoiseStream stream(seed);
  Dataset out(base.feature_dim());
  for (const auto& s : base.samples()) {
    for (int c = 0; c < copies; ++c) {
      DemoSample n = s;
      for (Eigen::Index i = 0; i < n.observation.features.size(); ++i) {
        if (stream.uniform(0.0, 1.0) < fraction) n.observation.features(i) = 0.0;
      }
      n.source = kSourceAugmentation;
      out.add(std::move(n));
    }
  }
  return out;
}

DaggerResult dagger_iterate(const RegressionController& learner, const Environment& env,
                            std::size_t traj_index, const Dataset& base, const DaggerConfig& cfg) {
  if (cfg.steps < 1) throw InvalidInputError("dagger: steps must be >= 1");
  if (cfg.iteration < 1) throw InvalidInputError("dagger: iteration must be >= 1");
  if (!(cfg.dt > 0.0)) throw InvalidInputError("dagger: dt must be positive");
  const Trajectory& traj = env.trajectory(traj_index);
  NoiseStream stream(mix_seed(cfg.seed, env.noise_seed() + 0x9000 + cfg.iteration));

  DaggerResult out;
  out.data = base;
  const std::string source = dagger_source(cfg.iteration);
  Pose pose = traj.pose_at(cfg.start_arc);
  double t = 0.0;
  for (int k = 0; k < cfg.steps; ++k) {
    const Observation obs = env.observe(pose, stream, t);
    ++out.rollout_steps;
    if (const auto label = try_expert_command(pose, traj, cfg.expert)) {
      out.data.add({obs, *label, pose, traj.id(), source});
    } else {
      ++out.expert_lost_skips;
    }
    pose = step_unicycle(pose, regression_act(learner, obs), cfg.dt);
    t += cfg.dt;
    if (!env.bounds().contains(pose.position())) {
      out.truncated = true;
      out.reason = "left the world bounds after " + std::to_string(k + 1) + " steps";
      break;
    }
    if (cross_track(pose, traj).distance > cfg.max_deviation) {
      out.truncated = true;
      out.reason = "deviated beyond " + std::to_string(cfg.max_deviation) + " m after " +
                   std::to_string(k + 1) + " steps";
      break;
    }
  }
  return out;
}

}  // namespace tng
