#include "tng/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "tng/demonstrations.hpp"
#include "tng/error.hpp"

namespace tng {

ExpertPolicy::ExpertPolicy(const Trajectory& traj, ExpertConfig cfg) : traj_(traj), cfg_(cfg) {
  validate(cfg_);
}

PolicyAction ExpertPolicy::act(const Pose& pose, const Observation&, double) {
  return {expert_command(pose, traj_, cfg_), false};
}

std::unique_ptr<Policy> ExpertPolicy::clone() const { return std::make_unique<ExpertPolicy>(*this); }

RegressionPolicy::RegressionPolicy(RegressionController controller)
    : controller_(std::move(controller)) {}

PolicyAction RegressionPolicy::act(const Pose&, const Observation& obs, double) {
  return {regression_act(controller_, obs), false};
}

std::unique_ptr<Policy> RegressionPolicy::clone() const {
  return std::make_unique<RegressionPolicy>(*this);
}

DetectionPolicy::DetectionPolicy(DetectionController controller)
    : initial_(controller), controller_(std::move(controller)) {}

void DetectionPolicy::reset() { controller_ = initial_; }

PolicyAction DetectionPolicy::act(const Pose&, const Observation& obs, double dt) {
  const DetectionAction a = detection_act(controller_, obs, dt);
  return {a.command, a.abstained};
}

std::unique_ptr<Policy> DetectionPolicy::clone() const {
  return std::make_unique<DetectionPolicy>(initial_);
}

std::unique_ptr<Policy> make_policy(const AnyController& controller) {
  if (const auto* r = std::get_if<RegressionController>(&controller)) {
    return std::make_unique<RegressionPolicy>(*r);
  }
  return std::make_unique<DetectionPolicy>(std::get<DetectionController>(controller));
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

LapReport run_lap_experiment(Policy& policy, const Environment& env, std::size_t traj_index,
                             const LapConfig& cfg) {
  const Trajectory& traj = env.trajectory(traj_index);
  if (!traj.closed()) throw InvalidInputError("lap experiments need a closed trajectory");
  if (cfg.laps < 1) throw InvalidInputError("lap count must be >= 1");
  if (!(cfg.dt > 0.0)) throw InvalidInputError("dt must be positive");
  if (!(cfg.step_budget_factor > 0.0)) throw InvalidInputError("step budget factor must be positive");
  validate(cfg.supervisor);

  LapReport rep;
  rep.controller = policy.name();
  rep.laps_target = cfg.laps;
  const double cruise = cfg.supervisor.recovery.cruise_speed;
  const long budget = static_cast<long>(
      std::ceil(cfg.step_budget_factor * cfg.laps * traj.length() / (cruise * cfg.dt)));

  policy.reset();
  NoiseStream stream(mix_seed(cfg.seed, env.noise_seed()));
  Pose pose = traj.pose_at(cfg.start_arc);
  ProgressTracker progress(traj, pose);
  SupervisorState sup;
  std::vector<double> errors;
  long tick = 0;
  long human_ticks = 0;
  for (; tick < budget; ++tick) {
    const double t = tick * cfg.dt;
    const SupervisorStep s = supervisor_step(pose, traj, cfg.supervisor, sup, cfg.dt);
    if (s.started) rep.interventions.push_back({t, t, sup.trigger});
    if (s.ended) rep.interventions.back().end = t;
    const Observation obs = env.observe(pose, stream, t);
    MotorCommand cmd;
    if (s.mode == SupervisorMode::Intervening) {
      const auto expert = try_expert_command(pose, traj, cfg.supervisor.recovery);
      if (!expert) {
        rep.failed = true;
        break;
      }
      cmd = *expert;
      ++human_ticks;
    } else {
      const PolicyAction a = policy.act(pose, obs, cfg.dt);
      if (a.abstained) ++rep.abstentions;
      cmd = a.command;
      rep.distance += std::abs(cmd.linear) * cfg.dt;
    }
    pose = step_unicycle(pose, cmd, cfg.dt);
    errors.push_back(cross_track(pose, traj).distance);
    rep.laps_completed = static_cast<int>(std::floor(progress.update(pose) / traj.length() + 1e-9));
    if (rep.laps_completed >= cfg.laps) {
      ++tick;
      break;
    }
  }
  rep.budget_exhausted = !rep.failed && rep.laps_completed < cfg.laps;
  rep.total_time = tick * cfg.dt;
  rep.human_time = human_ticks * cfg.dt;
  if (!rep.interventions.empty() && rep.interventions.back().end <= rep.interventions.back().start) {
    rep.interventions.back().end = rep.total_time;
  }
  rep.pa = rep.total_time > 0.0 ? percentage_autonomy(rep.human_time, rep.total_time) : 100.0;
  if (!errors.empty()) {
    rep.max_cross_track = *std::max_element(errors.begin(), errors.end());
    rep.median_cross_track = median(errors);
  }
  return rep;
}

RecoveryResult run_recovery(Policy& policy, const Environment& env, std::size_t traj_index,
                            const RecoveryConfig& cfg) {
  if (cfg.steps < 1 || cfg.hold < 1 || cfg.hold > cfg.steps) {
    throw InvalidInputError("recovery: need 1 <= hold <= steps");
  }
  const Trajectory& traj = env.trajectory(traj_index);
  const Pose base = traj.pose_at(cfg.arc);
  Pose pose{base.x - std::sin(base.theta) * cfg.lateral_offset,
            base.y + std::cos(base.theta) * cfg.lateral_offset,
            normalize_angle(base.theta + cfg.heading_offset)};
  policy.reset();
  NoiseStream stream(mix_seed(cfg.seed, env.noise_seed()));
  RecoveryResult r;
  r.heading_offset = cfg.heading_offset;
  int run_start = -1;
  for (int k = 1; k <= cfg.steps; ++k) {
    const Observation obs = env.observe(pose, stream, (k - 1) * cfg.dt);
    pose = step_unicycle(pose, policy.act(pose, obs, cfg.dt).command, cfg.dt);
    if (!env.bounds().contains(pose.position())) {
      r.left_bounds = true;
      run_start = -1;
      break;
    }
    const double e = cross_track(pose, traj).distance;
    r.max_cross_track = std::max(r.max_cross_track, e);
    r.final_cross_track = e;
    if (e < cfg.tolerance) {
      if (run_start < 0) run_start = k;
    } else {
      run_start = -1;
    }
  }
  r.converged = !r.left_bounds && run_start >= 0 && run_start <= cfg.steps - cfg.hold;
  r.converged_step = r.converged ? run_start : -1;
  return r;
}

std::vector<RecoveryResult> recovery_envelope(Policy& policy, const Environment& env,
                                              std::size_t traj_index,
                                              const std::vector<double>& offsets,
                                              const RecoveryConfig& cfg) {
  std::vector<RecoveryResult> out;
  for (double off : offsets) {
    RecoveryConfig c = cfg;
    c.heading_offset = off;
    out.push_back(run_recovery(policy, env, traj_index, c));
  }
  return out;
}

Environment perturb_environment(const Environment& env, double magnitude, std::uint64_t seed) {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw InvalidInputError("perturbation magnitude must be >= 0");
  }
  EnvironmentSpec spec = env.spec();
  NoiseStream stream(mix_seed(seed, 0x9e3d));
  for (Landmark& lm : spec.landmarks) {
    lm.x += magnitude * stream.gaussian();
    lm.y += magnitude * stream.gaussian();
  }
  spec.noise_seed = mix_seed(env.noise_seed(), seed);
  // The world box is a property of the layout, so landmarks pushed past it
  // stay where they are; only trajectories define the bounds.
  return Environment(std::move(spec));
}

DegradationReport run_degradation_study(const std::vector<Policy*>& policies,
                                        const Environment& env, std::size_t traj_index,
                                        const DegradationConfig& cfg) {
  if (cfg.magnitudes.empty()) throw InvalidInputError("degradation: no magnitudes");
  DegradationReport rep;
  rep.magnitudes = cfg.magnitudes;
  rep.seed = cfg.seed;
  std::vector<Environment> worlds;
  for (double m : cfg.magnitudes) worlds.push_back(perturb_environment(env, m, cfg.seed));
  for (Policy* p : policies) {
    DegradationRow row;
    row.controller = p->name();
    for (const Environment& w : worlds) {
      LapConfig lc = cfg.laps;
      lc.seed = mix_seed(cfg.seed, 0x1a9);
      row.pa.push_back(run_lap_experiment(*p, w, traj_index, lc).pa);
    }
    for (double pa : row.pa) row.delta.push_back(pa - row.pa.front());
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

DaggerStudyConfig::DaggerStudyConfig() { training.augment = false; }

DaggerStudyReport run_dagger_study(const Environment& env, std::size_t traj_index,
                                   const DaggerStudyConfig& cfg) {
  if (cfg.iterations < 0) throw InvalidInputError("dagger study: iterations must be >= 0");
  DaggerStudyReport rep;
  rep.seeds = cfg.seeds;
  for (std::uint64_t seed : cfg.seeds) {
    ControllerTrainConfig tc = cfg.training;
    tc.dagger_iterations = cfg.iterations;
    tc.seed = seed;
    std::vector<std::size_t> counts;
    std::vector<double> pas;
    train_regression_pipeline(env, traj_index, tc, [&](int, const RegressionController& c) {
      RegressionPolicy policy(c);
      LapConfig lc = cfg.laps;
      lc.seed = mix_seed(seed, 0xda9);
      const LapReport lr = run_lap_experiment(policy, env, traj_index, lc);
      counts.push_back(lr.interventions.size());
      pas.push_back(lr.pa);
    });
    rep.interventions.push_back(std::move(counts));
    rep.pa.push_back(std::move(pas));
  }
  rep.non_increasing = true;
  for (int it = 0; it <= cfg.iterations; ++it) {
    std::vector<double> column;
    for (const auto& row : rep.interventions) column.push_back(double(row[it]));
    rep.median_interventions.push_back(median(column));
    if (it > 0 && rep.median_interventions[it] > rep.median_interventions[it - 1]) {
      rep.non_increasing = false;
    }
  }
  return rep;
}

const MatrixCell* MatrixReport::cell(std::size_t src, std::size_t dst) const {
  for (const auto& c : cells) {
    if (c.src == src && c.dst == dst) return &c;
  }
  return nullptr;
}

MatrixCell run_navigation_episode(const TngGraph& graph, const Environment& env, std::size_t src,
                                  std::size_t dst, const MatrixConfig& cfg, EpisodeLog* log_out) {
  const std::size_t n = graph.vertex_count();
  if (n != env.trajectories().size()) {
    throw DimensionMismatchError("graph vertex count vs trajectories", env.trajectories().size(), n);
  }
  if (src >= n || dst >= n) throw InvalidInputError("navigation: trajectory index out of range");
  MatrixCell cell;
  cell.src = src;
  cell.dst = dst;
  NoiseStream stream(mix_seed(cfg.seed, src * n + dst));
  const SampledPose start = sample_pose(env, src, cfg.start_clearance, stream);
  const SampledPose goal = sample_pose(env, dst, cfg.start_clearance, stream);
  const Observation goal_obs = capture(env, goal.pose, cfg.goal_captures, stream);
  cell.start_vertex = localize(graph, env.observe(start.pose, stream)).vertex;
  cell.goal_vertex = identify_goal(graph, goal_obs);
  Plan p;
  try {
    p = plan(graph, cell.start_vertex, cell.goal_vertex);
  } catch (const NoPathError& e) {
    cell.no_path = true;
    cell.failure_reason = e.what();
    return cell;
  }
  cell.hops = p.edges.size();
  const GoalReacher reacher = make_goal_reacher_for(env, dst, goal, goal_obs, cfg.goal_window);
  EpisodeLog log = execute(graph, p, env, start.pose, reacher, cfg.episode, stream);
  cell.outcome = log.outcome;
  cell.failure_reason = log.failure_reason;
  cell.total_time = log.total_time;
  cell.human_time = log.human_time;
  cell.distance = log.distance;
  cell.interventions = log.interventions.size();
  cell.pa = log.total_time > 0.0 ? percentage_autonomy(log) : 100.0;
  if (log_out) *log_out = std::move(log);
  return cell;
}

MatrixReport run_navigation_matrix(const TngGraph& graph, const Environment& env,
                                   const MatrixConfig& cfg) {
  const std::size_t n = graph.vertex_count();
  if (n < 2) throw InvalidInputError("navigation matrix needs at least two trajectories");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  MatrixReport rep;
  rep.size = n;
  rep.cells.resize(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < pairs.size(); k = next++) {
      try {
        rep.cells[k] = run_navigation_episode(graph, env, pairs[k].first, pairs[k].second, cfg);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp(cfg.jobs, 1, static_cast<int>(pairs.size()));
  std::vector<std::thread> threads;
  for (int t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double pa_sum = 0.0;
  std::size_t ran = 0;
  for (const MatrixCell& c : rep.cells) {
    if (c.no_path) {
      ++rep.flagged;
      continue;
    }
    pa_sum += c.pa;
    ++ran;
    rep.total_distance += c.distance;
    if (c.outcome == Outcome::Done) ++rep.done;
  }
  rep.mean_pa = ran > 0 ? pa_sum / double(ran) : 0.0;
  return rep;
}

}  // namespace tng
