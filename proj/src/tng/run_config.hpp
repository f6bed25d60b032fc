#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tng/experiments.hpp"
#include "tng/pipeline.hpp"

namespace tng {

// Experiment parameters shared by the CLI and the C API. Parsed from a JSON
// object whose sections are all optional:
//   collect {laps, dt}, expert {lookahead, cruise_speed, max_angular, lost_distance},
//   augment {enabled, max_lateral, max_rotation, copies},
//   regression {lambda, head, optimizer, rate, steps, batch, cosine_decay, hidden},
//   dagger {iterations, laps, max_deviation},
//   detector {width, shift, deadband, lambda, training_confidence},
//   pid {kp, ki, kd, integral_limit}, confidence_floor,
//   classifier {rate, epochs, weight_decay},
//   graph {controller, weights, window, exemplar_captures},
//   supervisor {max_cross_track, max_heading_error, grace, recover_to},
//   laps {laps, step_budget_factor, start_arc},
//   episode {timeout, min_switch_interval, supervise, record_ticks},
//   matrix {start_clearance, goal_window, goal_captures, jobs},
//   degradation {magnitudes}, paths {...}, seed.
// Unknown keys are rejected so typos do not silently fall back to defaults.
struct RunConfig {
  GraphBuildConfig graph;  // carries the controller and classifier training settings
  SupervisorConfig supervisor;
  LapConfig laps;
  MatrixConfig matrix;
  DegradationConfig degradation;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

RunConfig parse_run_config(const std::string& text);

// Copies `seed` into every seeded section.
void apply_seed(RunConfig& cfg, std::uint64_t seed);

}  // namespace tng
