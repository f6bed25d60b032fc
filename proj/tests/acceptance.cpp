// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "tng/classifiers.hpp"
#include "tng/detection.hpp"
#include "tng/error.hpp"
#include "tng/experiments.hpp"
#include "tng/expert.hpp"
#include "tng/graph.hpp"
#include "tng/pipeline.hpp"
#include "tng/regression_controller.hpp"
#include "tng/reports.hpp"
#include "tng/ridge.hpp"

namespace {

using namespace tng;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double v, int precision = 3) { return format_number(v, precision); }

// 1. Gradient-trained ridge heads agree with the closed form.
void ridge_oracle(Verdict& out) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 10 + static_cast<int>(rng() % 191);
    const int d = 1 + static_cast<int>(rng() % 32);
    Dataset data(d);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd f(d);
      for (int k = 0; k < d; ++k) f[k] = g(rng);
      data.add({{f, 0.0}, {u(rng), u(rng)}, {}, 0, kSourceExpertLap});
    }
    RegressionTrainConfig exact_cfg;
    RegressionTrainConfig adam_cfg;
    adam_cfg.optimizer = Optimizer::Adam;
    adam_cfg.gradient.seed = static_cast<std::uint64_t>(trial);
    const RegressionController exact_fit = train_regression(data, exact_cfg, 0);
    const RegressionController adam_fit = train_regression(data, adam_cfg, 0);
    const auto& exact = std::get<LinearHead>(exact_fit.head);
    const auto& adam = std::get<LinearHead>(adam_fit.head);
    worst = std::max({worst, (exact.weights - adam.weights).cwiseAbs().maxCoeff(),
                      (exact.bias - adam.bias).cwiseAbs().maxCoeff()});
  }
  const double t = seconds_since(t0);
  out.detail << "50 problems, max parameter gap " << worst << ", " << fmt(t, 1) << " s";
  out.require(worst <= 1e-4, "gap <= 1e-4");
  out.require(t < 10.0, "runtime < 10 s");
}

// 2. Dijkstra agrees with exhaustive path enumeration.
double brute_force_weight(std::size_t n, const std::vector<WeightedEdge>& edges, std::size_t src,
                          std::size_t dst) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> used(n, 0);
  std::function<void(std::size_t, double)> dfs = [&](std::size_t v, double w) {
    if (v == dst) {
      best = std::min(best, w);
      return;
    }
    used[v] = 1;
    for (const WeightedEdge& e : edges) {
      if (e.from == v && !used[e.to]) dfs(e.to, w + e.weight);
    }
    used[v] = 0;
  };
  dfs(src, 0.0);
  return best;
}

void dijkstra_oracle(Verdict& out) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> w(0.1, 10.0);
  int mismatches = 0;
  int reachable = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<WeightedEdge> edges;
    const std::size_t m = rng() % 21;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t a = rng() % n;
      const std::size_t b = rng() % n;
      if (a != b) edges.push_back({a, b, w(rng)});
    }
    const std::size_t src = rng() % n;
    const std::size_t dst = rng() % n;
    const double oracle = brute_force_weight(n, edges, src, dst);
    try {
      const Plan p = plan_path(n, edges, src, dst);
      ++reachable;
      if (std::isinf(oracle) || std::abs(p.total_weight - oracle) > 1e-9) ++mismatches;
    } catch (const NoPathError&) {
      if (!std::isinf(oracle)) ++mismatches;
    }
  }
  const double t = seconds_since(t0);
  out.detail << "500 graphs (" << reachable << " reachable), " << mismatches << " mismatches, "
             << fmt(t, 2) << " s";
  out.require(mismatches == 0, "no mismatches");
  out.require(t < 5.0, "runtime < 5 s");
}

// 3. Kinematic, tracking and PID oracles.
void unit_oracles(Verdict& out) {
  int checks = 0;
  auto check = [&](bool ok, const std::string& what) {
    ++checks;
    out.require(ok, what);
  };
  const Pose arc = step_unicycle({0, 0, 0}, {1.0, 1.0}, 1.0);
  check(std::abs(arc.x - std::sin(1.0)) < 1e-12 && std::abs(arc.y - (1 - std::cos(1.0))) < 1e-12 &&
            std::abs(arc.theta - 1.0) < 1e-12,
        "unicycle arc");
  const Pose line = step_unicycle({0, 0, 0}, {1.0, 0.0}, 1.0);
  check(std::abs(line.x - 1.0) < 1e-12 && std::abs(line.y) < 1e-12, "unicycle straight");
  const Pose spin = step_unicycle({0, 0, 0}, {0.0, 1.0}, 1.0);
  check(std::abs(spin.x) < 1e-12 && std::abs(spin.theta - 1.0) < 1e-12, "unicycle spin");

  // Cross-track against an analytic point-to-segment minimum.
  const Environment loop = test::load_bundled("loop");
  const Trajectory& traj = loop.trajectory(0);
  const auto wps = traj.waypoints();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-6, 6), uth(-3, 3);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose p{ux(rng), ux(rng), uth(rng)};
    double best = std::numeric_limits<double>::infinity();
    const std::size_t segs = traj.closed() ? wps.size() : wps.size() - 1;
    for (std::size_t k = 0; k < segs; ++k) {
      const Vec2 a = wps[k];
      const Vec2 b = wps[(k + 1) % wps.size()];
      const Vec2 ab{b.x - a.x, b.y - a.y};
      const Vec2 ap{p.x - a.x, p.y - a.y};
      const double s = std::clamp(dot(ap, ab) / dot(ab, ab), 0.0, 1.0);
      best = std::min(best, std::hypot(ap.x - s * ab.x, ap.y - s * ab.y));
    }
    worst = std::max(worst, std::abs(cross_track(p, traj).distance - best));
  }
  check(worst < 1e-6, "cross-track oracle");

  // Pure pursuit curvature on unsaturated on-path poses.
  const ExpertConfig ec;
  double curvature_gap = 0.0;
  std::uniform_real_distribution<double> us(0.0, traj.length());
  for (int i = 0; i < 1000; ++i) {
    const Pose p = traj.pose_at(us(rng));
    const MotorCommand c = expert_command(p, traj, ec);
    const double alpha = lookahead_bearing(p, traj, ec.lookahead);
    const double expected = 2.0 * ec.cruise_speed * std::sin(alpha) / ec.lookahead;
    if (std::abs(expected) < ec.max_angular) curvature_gap = std::max(curvature_gap, std::abs(c.angular - expected));
  }
  check(curvature_gap < 1e-9, "pure pursuit curvature");

  PidState pid;
  pid.gains = {1.0, 0.5, 0.0, 100.0};
  double u = 0.0;
  for (int k = 0; k < 3; ++k) {
    const PidOutput o = pid_step(pid, 1.0, 1.0);
    pid = o.state;
    u = o.u;
  }
  check(std::abs(u + 2.5) < 1e-12, "PID accumulation");

  Eigen::MatrixXd x(2, 1), y(2, 1);
  x << 1, 1;
  y << 1, 1;
  check(std::abs(solve_ridge(x, y, 1.0, false).weights(0, 0) - 2.0 / 3.0) < 1e-12, "ridge 2/3");

  const Trajectory straight(0, "line", {{0, 0}, {5, 0}, {10, 0}}, false);
  check(std::abs(label_direction({1, 0, 0}, straight, {0.5, 0.0}).x - 448.0) < 1e-12, "straight label");
  check(std::abs(label_direction({1, 0, 0}, straight, {0.5, 0.5}).x - 298.0) < 1e-12, "left label");

  out.detail << checks << " oracle groups, cross-track gap " << worst << ", curvature gap " << curvature_gap;
}

// 4. Both controllers on the noiseless loop, seeds 1-3.
void loop_laps(Verdict& out) {
  const Environment env = test::load_bundled("loop");
  for (std::uint64_t seed : {1, 2, 3}) {
    ControllerTrainConfig tc;
    tc.seed = seed;
    tc.collect.seed = seed;
    LapConfig lc;
    lc.seed = seed;

    auto t0 = Clock::now();
    RegressionPolicy reg(train_regression_pipeline(env, 0, tc).controller);
    const LapReport r = run_lap_experiment(reg, env, 0, lc);
    const double tr = seconds_since(t0);

    t0 = Clock::now();
    DetectionPolicy det(train_detection_pipeline(env, 0, tc));
    const LapReport d = run_lap_experiment(det, env, 0, lc);
    const double td = seconds_since(t0);

    out.detail << " seed " << seed << ": regression PA " << fmt(r.pa, 2) << " (" << fmt(tr, 1)
               << " s), detection PA " << fmt(d.pa, 2) << " (" << fmt(td, 1) << " s);";
    out.require(r.pa >= 99.0 && r.laps_completed == 10, "regression seed " + std::to_string(seed));
    out.require(d.pa >= 99.0 && d.laps_completed == 10, "detection seed " + std::to_string(seed));
    out.require(tr < 120.0 && td < 120.0, "runtime < 2 min per controller");
  }
}

// 5. Heading-offset recovery envelopes on the straight path.
void recovery(Verdict& out) {
  const Environment env = test::load_bundled("straight");
  ControllerTrainConfig tc;
  tc.seed = 1;
  tc.collect.seed = 1;
  DetectionPolicy det(train_detection_pipeline(env, 0, tc));
  ControllerTrainConfig plain = tc;
  plain.augment = false;
  plain.dagger_iterations = 0;
  RegressionPolicy reg(train_regression_pipeline(env, 0, plain).controller);

  RecoveryConfig rc;
  rc.arc = 2.5;
  rc.seed = 1;
  const std::vector<double> offsets{-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4};
  auto envelope = [&](Policy& p, const char* name) {
    const auto results = recovery_envelope(p, env, 0, offsets, rc);
    out.detail << " " << name << ":";
    for (const RecoveryResult& r : results) {
      out.detail << " " << fmt(r.heading_offset, 1) << (r.converged ? "+" : "x");
    }
    return results;
  };
  // Largest magnitude a such that every offset with |offset| <= a converged.
  auto reach = [&](const std::vector<RecoveryResult>& results) {
    double bound = 0.0;
    for (double a : {0.0, 0.1, 0.2, 0.3, 0.4}) {
      for (const RecoveryResult& r : results) {
        if (std::abs(std::abs(r.heading_offset) - a) < 1e-9 && !r.converged) return bound;
      }
      bound = a;
    }
    return bound;
  };
  const auto d = envelope(det, "detection");
  out.detail << ";";
  const auto r = envelope(reg, "regression without augmentation");
  out.detail << "; recovers up to " << fmt(reach(d), 1) << " rad (detection), " << fmt(reach(r), 1)
             << " rad (regression)";
  bool det_ok = true;
  for (const RecoveryResult& x : d) det_ok = det_ok && x.converged;
  out.require(det_ok, "detection converges from every offset up to 0.4 rad");
}

// 6. DAgger on the noisy loop.
void dagger(Verdict& out) {
  const auto t0 = Clock::now();
  const Environment env = test::load_bundled("loop_noisy");
  const DaggerStudyReport rep = run_dagger_study(env, 0, DaggerStudyConfig{});
  out.detail << "median interventions per iteration:";
  for (double m : rep.median_interventions) out.detail << " " << fmt(m, 1);
  out.detail << ", " << fmt(seconds_since(t0), 1) << " s";
  out.require(rep.median_interventions.size() == 4, "base fit plus 3 iterations");
  out.require(rep.non_increasing, "non-increasing medians");
}

// 7. All-pairs navigation on the five-trajectory world.
void navigation(Verdict& out) {
  const auto t0 = Clock::now();
  for (const char* name : {"star5", "star5_noisy"}) {
    const Environment env = test::load_bundled(name);
    GraphBuildConfig gc;
    gc.seed = 1;
    gc.training.seed = 1;
    const NavigationBuild nb = build_navigation_graph(env, gc);
    MatrixConfig mc;
    mc.seed = 1;
    const MatrixReport rep = run_navigation_matrix(nb.graph, env, mc);
    const double sigma = env.featurizer_config().noise_sigma;
    out.detail << " sigma " << fmt(sigma, 2) << ": " << rep.done << "/" << rep.cells.size()
               << " Done, mean PA " << fmt(rep.mean_pa, 2) << ";";
    out.require(rep.cells.size() == 20 && rep.done == 20, std::string(name) + " all pairs Done");
    if (sigma == 0.0) {
      out.require(std::abs(rep.mean_pa - 100.0) < 1e-9, "noiseless mean PA = 100");
    } else {
      out.require(rep.mean_pa >= 90.0, "noisy mean PA >= 90");
    }
  }
  const double t = seconds_since(t0);
  out.detail << " " << fmt(t, 1) << " s";
  out.require(t < 600.0, "runtime < 10 min");
}

// 8. Degradation report is reproducible per seed.
void degradation(Verdict& out) {
  const Environment env = test::load_bundled("loop_noisy");
  ControllerTrainConfig tc;
  tc.seed = 1;
  tc.collect.seed = 1;
  RegressionPolicy reg(train_regression_pipeline(env, 0, tc).controller);
  DetectionPolicy det(train_detection_pipeline(env, 0, tc));
  DegradationConfig cfg;
  cfg.seed = 8;
  cfg.laps.seed = 8;
  const DegradationReport a = run_degradation_study({&reg, &det}, env, 0, cfg);
  const DegradationReport b = run_degradation_study({&reg, &det}, env, 0, cfg);
  for (const DegradationRow& row : a.rows) {
    out.detail << " " << row.controller << " dPA";
    for (double d : row.delta) out.detail << " " << fmt(d, 2);
    out.detail << ";";
  }
  // Supplementary: median cross-track on the same perturbed worlds, since PA
  // alone saturates below the supervisor bound.
  for (Policy* p : std::vector<Policy*>{&reg, &det}) {
    out.detail << " " << p->name() << " median cross-track m";
    for (double m : cfg.magnitudes) {
      LapConfig lc = cfg.laps;
      lc.seed = mix_seed(cfg.seed, 0x1a9);
      out.detail << " " << fmt(run_lap_experiment(*p, perturb_environment(env, m, cfg.seed), 0, lc).median_cross_track, 4);
    }
    out.detail << ";";
  }
  out.require(a.magnitudes == std::vector<double>({0.0, 0.1, 0.2, 0.4}), "magnitudes 0, 0.1, 0.2, 0.4");
  out.require(a.rows.size() == 2, "one row per controller");
  out.require(degradation_csv(a) == degradation_csv(b), "CSV byte-identical");
  out.require(degradation_json(a) == degradation_json(b), "JSON byte-identical");
  out.detail << " reports byte-identical across runs: "
             << (degradation_csv(a) == degradation_csv(b) && degradation_json(a) == degradation_json(b) ? "yes"
                                                                                                      : "no");
}

// 9. Indicator and percentage-autonomy properties.
void fuzz_invariants(Verdict& out) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  int indicator_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const int c = 1 + static_cast<int>(rng() % 10);
    Eigen::VectorXd z(c);
    for (int k = 0; k < c; ++k) z[k] = (i % 4 == 0) ? std::round(g(rng)) : 10 * g(rng);  // rounding forces ties
    const Classification cl = classify_logits(z);
    int sum = 0;
    for (int v : cl.indicator) sum += v;
    if (sum != 1 || cl.indicator[cl.index] != 1 || z[static_cast<Eigen::Index>(cl.index)] != z.maxCoeff()) {
      ++indicator_bad;
    }
    for (std::size_t k = 0; k < cl.index; ++k) {
      if (z[static_cast<Eigen::Index>(k)] == z.maxCoeff()) ++indicator_bad;  // first maximum wins
    }
  }
  int pa_bad = 0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double tau = 1e-6 + 1e4 * u(rng);
    const double tau_h = tau * u(rng);
    const double pa = percentage_autonomy(tau_h, tau);
    if (!(pa >= 0.0 && pa <= 100.0)) ++pa_bad;
    if (percentage_autonomy(0.0, tau) != 100.0) ++pa_bad;
    if (std::abs(percentage_autonomy(tau, tau)) > 1e-12) ++pa_bad;
  }
  out.detail << "indicator violations " << indicator_bad << "/10000, PA violations " << pa_bad << "/10000";
  out.require(indicator_bad == 0, "indicator sums to one at the first maximum");
  out.require(pa_bad == 0, "PA bounds and endpoints");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
      {"ridge gradient vs closed form", ridge_oracle},
      {"planner vs brute force", dijkstra_oracle},
      {"unit oracles", unit_oracles},
      {"loop laps, both controllers", loop_laps},
      {"heading recovery", recovery},
      {"DAgger interventions", dagger},
      {"navigation matrix", navigation},
      {"degradation reproducibility", degradation},
      {"indicator and PA invariants", fuzz_invariants},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    Verdict out;
    try {
      criteria[i].second(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    all = all && out.pass;
    std::cout << "criterion " << number << " " << (out.pass ? "PASS" : "FAIL") << ": " << criteria[i].first
              << ": " << out.detail.str() << std::endl;
  }
  return all ? 0 : 1;
}
