#include "tng/executive.hpp"

#include <cmath>

#include "tng/error.hpp"

namespace tng {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Following: return "following";
    case Phase::Switching: return "switching";
    case Phase::GoalSeeking: return "goal-seeking";
    case Phase::Done: return "done";
    case Phase::Failed: return "failed";
  }
  return "unknown";
}

const char* outcome_name(Outcome o) { return o == Outcome::Done ? "Done" : "Failed"; }

Executive::Executive(const TngGraph& graph, Plan plan, GoalReacher goal, ExecutiveConfig cfg)
    : graph_(&graph), plan_(std::move(plan)), goal_(std::move(goal)), cfg_(cfg),
      controllers_(graph.controllers) {
  if (!(cfg_.dt > 0.0)) throw InvalidInputError("executive: dt must be positive");
  if (plan_.vertices.empty() || plan_.edges.size() + 1 != plan_.vertices.size()) {
    throw InvalidInputError("executive: malformed plan");
  }
  for (std::size_t k = 0; k < plan_.edges.size(); ++k) {
    const std::size_t e = plan_.edges[k];
    if (e >= graph.edges.size() || graph.edges[e].from() != plan_.vertices[k] ||
        graph.edges[e].to() != plan_.vertices[k + 1]) {
      throw InvalidInputError("executive: plan does not match the graph");
    }
  }
  for (std::size_t v : plan_.vertices) {
    if (v >= graph.vertex_count()) throw InvalidInputError("executive: plan vertex out of range");
  }
  was_firing_.assign(graph.edges.size(), 0);
  phase_ = plan_.edges.empty() ? Phase::GoalSeeking : Phase::Following;
}

void Executive::fail(const std::string& reason, double t) {
  if (phase_ == Phase::Done || phase_ == Phase::Failed) return;
  phase_ = Phase::Failed;
  failure_reason_ = reason;
  events_.push_back({t, "failed", reason});
}

MotorCommand Executive::run_controller(const Observation& obs, bool& abstained, double t) {
  AnyController& c = controllers_[active_vertex()];
  abstained = false;
  if (auto* r = std::get_if<RegressionController>(&c)) return regression_act(*r, obs);
  DetectionAction a = detection_act(std::get<DetectionController>(c), obs, cfg_.dt);
  if (a.abstained) {
    abstained = true;
    events_.push_back({t, "abstain", "vertex " + std::to_string(active_vertex())});
  }
  return a.command;
}

Executive::Decision Executive::tick(const Observation& obs, double t) {
  Decision d;
  d.phase = phase_;
  if (phase_ == Phase::Done || phase_ == Phase::Failed) return d;

  if (phase_ == Phase::Following) {
    const TngEdge& planned = graph_->edges[plan_.edges[cursor_]];
    std::size_t fired = graph_->edges.size();
    for (std::size_t k = 0; k < graph_->edges.size(); ++k) {
      const TngEdge& e = graph_->edges[k];
      const bool firing = detect_intersection(e.classifier, obs);
      const bool same_hop = e.from() == planned.from() && e.to() == planned.to();
      if (firing && same_hop && fired == graph_->edges.size()) fired = k;
      if (firing && !same_hop && !was_firing_[k]) {
        events_.push_back({t, "ignored-edge",
                           std::to_string(e.from()) + "->" + std::to_string(e.to())});
      }
      was_firing_[k] = firing ? 1 : 0;
    }
    if (fired < graph_->edges.size() && t - last_switch_ >= cfg_.min_switch_interval - 1e-9) {
      const std::size_t from = active_vertex();
      ++cursor_;
      last_switch_ = t;
      switches_.push_back({t, fired, from, active_vertex(), pose_hint_});
      events_.push_back({t, "switch", std::to_string(from) + "->" + std::to_string(active_vertex())});
      if (auto* det = std::get_if<DetectionController>(&controllers_[active_vertex()])) {
        det->pid = PidState{det->pid.gains};
      }
      d.switched = true;
      d.phase = Phase::Switching;
      phase_ = cursor_ + 1 == plan_.vertices.size() ? Phase::GoalSeeking : Phase::Following;
    }
  }

  if (phase_ == Phase::GoalSeeking && goal_reached(goal_, obs)) {
    phase_ = Phase::Done;
    events_.push_back({t, "goal-reached", "vertex " + std::to_string(active_vertex())});
    if (!d.switched) d.phase = Phase::Done;
    return d;
  }
  d.command = run_controller(obs, d.abstained, t);
  return d;
}

double percentage_autonomy(const EpisodeLog& log) {
  return percentage_autonomy(log.human_time, log.total_time);
}

EpisodeLog execute(const TngGraph& graph, const Plan& plan, const Environment& env,
                   const Pose& start, const GoalReacher& goal, const EpisodeConfig& cfg,
                   NoiseStream& stream) {
  if (cfg.supervise) validate(cfg.supervisor);
  if (!(cfg.executive.timeout > 0.0)) throw InvalidInputError("execute: timeout must be positive");
  Executive exec(graph, plan, goal, cfg.executive);
  const double dt = cfg.executive.dt;
  const long max_ticks = static_cast<long>(std::ceil(cfg.executive.timeout / dt - 1e-9));

  EpisodeLog log;
  log.plan = plan;
  SupervisorState sup;
  Pose pose = start;
  long tick = 0;
  long human_ticks = 0;
  bool intervening = false;
  for (;; ++tick) {
    const double t = tick * dt;
    if (tick >= max_ticks) {
      exec.fail("timeout", t);
      break;
    }
    const Observation obs = env.observe(pose, stream, t);
    const std::size_t vertex = exec.active_vertex();
    const Trajectory& traj = env.trajectory(vertex);
    TickRecord rec;
    if (cfg.supervise) {
      const SupervisorStep s = supervisor_step(pose, traj, cfg.supervisor, sup, dt);
      if (s.started) {
        log.interventions.push_back({t, t, sup.trigger});
        log.events.push_back({t, "intervention-start", sup.trigger});
        rec.events.push_back("intervention-start");
      }
      if (s.ended) {
        log.interventions.back().end = t;
        log.events.push_back({t, "intervention-end", ""});
        rec.events.push_back("intervention-end");
      }
      intervening = s.mode == SupervisorMode::Intervening;
    }
    exec.set_pose_hint(pose);
    const std::size_t events_before = exec.events().size();
    const Executive::Decision d = exec.tick(obs, t);
    for (std::size_t k = events_before; k < exec.events().size(); ++k) {
      rec.events.push_back(exec.events()[k].kind);
    }
    if (d.abstained) ++log.abstentions;
    if (exec.phase() == Phase::Done) break;

    MotorCommand cmd = d.command;
    if (intervening) {
      const auto expert = try_expert_command(pose, traj, cfg.supervisor.recovery);
      if (!expert) {
        exec.fail("expert lost during recovery", t);
        break;
      }
      cmd = *expert;
      ++human_ticks;
    } else {
      log.distance += std::abs(cmd.linear) * dt;
    }
    if (cfg.record_ticks) {
      rec.t = t;
      rec.pose = pose;
      rec.command = cmd;
      rec.phase = d.phase;
      rec.vertex = vertex;
      rec.intervening = intervening;
      log.ticks.push_back(std::move(rec));
    }
    pose = step_unicycle(pose, cmd, dt);
    if (!env.bounds().contains(pose.position())) {
      exec.fail("left the world bounds", (tick + 1) * dt);
      ++tick;
      break;
    }
  }
  log.total_time = tick * dt;
  log.human_time = human_ticks * dt;
  log.autonomous_time = (tick - human_ticks) * dt;
  if (!log.interventions.empty() && intervening && log.interventions.back().end <= log.interventions.back().start) {
    log.interventions.back().end = log.total_time;
  }
  log.switches = exec.switches();
  for (const auto& e : exec.events()) log.events.push_back(e);
  std::stable_sort(log.events.begin(), log.events.end(),
                   [](const EpisodeEvent& a, const EpisodeEvent& b) { return a.t < b.t; });
  log.outcome = exec.phase() == Phase::Done ? Outcome::Done : Outcome::Failed;
  log.failure_reason = exec.failure_reason();
  log.final_pose = pose;
  return log;
}

}  // namespace tng
