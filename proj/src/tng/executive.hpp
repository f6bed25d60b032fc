#pragma once

#include <limits>
#include <string>
#include <vector>

#include "tng/environment.hpp"
#include "tng/graph.hpp"
#include "tng/supervisor.hpp"

namespace tng {

enum class Phase { Following, Switching, GoalSeeking, Done, Failed };
const char* phase_name(Phase p);

struct ExecutiveConfig {
  double dt = 0.1;
  double timeout = 600.0;             // s
  double min_switch_interval = 2.0;  // s between accepted switches
};

struct SwitchEvent {
  double t = 0.0;
  std::size_t edge = 0;  // edge whose classifier fired
  std::size_t from = 0;
  std::size_t to = 0;
  Pose pose;
};

struct EpisodeEvent {
  double t = 0.0;
  std::string kind;  // switch, ignored-edge, abstain, goal-reached, intervention-start, ...
  std::string detail;
};

// Controller-switching state machine. Following(v) runs vertex v's controller
// and watches the next planned hop; when a classifier for that hop fires (and
// the debounce interval has passed) the cursor advances. After the last hop
// the goal trajectory's controller runs until the goal reacher fires.
class Executive {
 public:
  Executive(const TngGraph& graph, Plan plan, GoalReacher goal, ExecutiveConfig cfg);

  struct Decision {
    MotorCommand command;
    bool abstained = false;
    bool switched = false;
    Phase phase = Phase::Following;  // phase this tick was decided in
  };

  Decision tick(const Observation& obs, double t);
  void fail(const std::string& reason, double t);

  Phase phase() const { return phase_; }
  std::size_t cursor() const { return cursor_; }
  std::size_t active_vertex() const { return plan_.vertices[cursor_]; }
  const Plan& plan() const { return plan_; }
  const std::vector<SwitchEvent>& switches() const { return switches_; }
  const std::vector<EpisodeEvent>& events() const { return events_; }
  const std::string& failure_reason() const { return failure_reason_; }

  // Pose is attached to switch events when known.
  void set_pose_hint(const Pose& pose) { pose_hint_ = pose; }

 private:
  MotorCommand run_controller(const Observation& obs, bool& abstained, double t);

  const TngGraph* graph_;
  Plan plan_;
  GoalReacher goal_;
  ExecutiveConfig cfg_;
  std::vector<AnyController> controllers_;  // per-episode copies (PID state)
  Phase phase_ = Phase::Following;
  std::size_t cursor_ = 0;
  double last_switch_ = -std::numeric_limits<double>::infinity();
  std::vector<char> was_firing_;
  std::vector<SwitchEvent> switches_;
  std::vector<EpisodeEvent> events_;
  std::string failure_reason_;
  Pose pose_hint_;
};

struct EpisodeConfig {
  ExecutiveConfig executive;
  bool supervise = true;
  SupervisorConfig supervisor;
  bool record_ticks = false;
};

struct TickRecord {
  double t = 0.0;
  Pose pose;
  MotorCommand command;
  Phase phase = Phase::Following;
  std::size_t vertex = 0;
  bool intervening = false;
  std::vector<std::string> events;
};

enum class Outcome { Done, Failed };
const char* outcome_name(Outcome o);

struct EpisodeLog {
  double total_time = 0.0;   // tau
  double human_time = 0.0;   // tau_h
  double autonomous_time = 0.0;
  double distance = 0.0;     // commanded linear speed integrated over autonomous time
  std::vector<Intervention> interventions;
  std::vector<SwitchEvent> switches;
  std::vector<EpisodeEvent> events;
  Outcome outcome = Outcome::Failed;
  std::string failure_reason;
  std::vector<TickRecord> ticks;
  Plan plan;
  std::size_t abstentions = 0;
  Pose final_pose;
};

// Percentage autonomy of an episode; throws if total_time is zero.
double percentage_autonomy(const EpisodeLog& log);

// Runs the executive in closed loop from `start` until Done, timeout or an
// unrecoverable supervisor abort.
EpisodeLog execute(const TngGraph& graph, const Plan& plan, const Environment& env,
                   const Pose& start, const GoalReacher& goal, const EpisodeConfig& cfg,
                   NoiseStream& stream);

}  // namespace tng
