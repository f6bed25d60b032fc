#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "tng/environment.hpp"
#include "tng/error.hpp"
#include "tng/experiments.hpp"
#include "tng/pipeline.hpp"
#include "tng/reports.hpp"
#include "tng/supervisor.hpp"

namespace tng {
namespace {

TEST(PercentageAutonomy, Examples) {
  EXPECT_DOUBLE_EQ(percentage_autonomy(0.0, 100.0), 100.0);
  EXPECT_DOUBLE_EQ(percentage_autonomy(100.0, 100.0), 0.0);
  EXPECT_NEAR(percentage_autonomy(3.7, 100.0), 96.3, 1e-12);
}

TEST(PercentageAutonomy, ZeroDurationIsAnError) {
  EXPECT_THROW(percentage_autonomy(0.0, 0.0), InvalidInputError);
  EpisodeLog log;
  EXPECT_THROW(percentage_autonomy(log), InvalidInputError);
}

TEST(PercentageAutonomy, ScaleInvariantAndBounded) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0), k(1e-3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const double tau = 1e-3 + 1e3 * u(rng);
    const double tau_h = tau * u(rng);
    const double pa = percentage_autonomy(tau_h, tau);
    ASSERT_GE(pa, 0.0);
    ASSERT_LE(pa, 100.0);
    const double s = k(rng);
    ASSERT_NEAR(percentage_autonomy(s * tau_h, s * tau), pa, 1e-9);
  }
}

TEST(Supervisor, ViolationMustPersistForTheGracePeriod) {
  const Trajectory traj(0, "line", {{0, 0}, {5, 0}, {10, 0}}, false);
  SupervisorConfig cfg;
  SupervisorState state;
  const Pose off{3.0, 1.0, 0.0};
  int ticks = 0;
  SupervisorStep s;
  do {
    s = supervisor_step(off, traj, cfg, state, 0.1);
    ++ticks;
  } while (!s.started && ticks < 100);
  EXPECT_TRUE(s.started);
  EXPECT_EQ(ticks, 10);  // ten ticks of violation accumulate the full second
  EXPECT_EQ(state.trigger, kTriggerCrossTrack);
  EXPECT_EQ(supervisor_step({3.0, 0.5, 0.0}, traj, cfg, state, 0.1).mode, SupervisorMode::Intervening);
  const SupervisorStep back = supervisor_step({3.0, 0.05, 0.0}, traj, cfg, state, 0.1);
  EXPECT_TRUE(back.ended);
  EXPECT_EQ(back.mode, SupervisorMode::Nominal);
}

TEST(Supervisor, BriefViolationsAreForgiven) {
  const Trajectory traj(0, "line", {{0, 0}, {5, 0}, {10, 0}}, false);
  SupervisorConfig cfg;
  SupervisorState state;
  for (int round = 0; round < 20; ++round) {
    for (int i = 0; i < 5; ++i) {
      EXPECT_FALSE(supervisor_step({3.0, 1.0, 0.0}, traj, cfg, state, 0.1).started);
    }
    supervisor_step({3.0, 0.0, 0.0}, traj, cfg, state, 0.1);
  }
}

TEST(Supervisor, HeadingTrigger) {
  const Trajectory traj(0, "line", {{0, 0}, {5, 0}, {10, 0}}, false);
  SupervisorConfig cfg;
  SupervisorState state;
  SupervisorStep s;
  for (int i = 0; i < 20 && !s.started; ++i) s = supervisor_step({3.0, 0.0, 2.0}, traj, cfg, state, 0.1);
  EXPECT_TRUE(s.started);
  EXPECT_EQ(state.trigger, kTriggerHeading);
}

// Follows the expert until it is told to drift, then holds the robot about
// one metre to the left of the path until the supervisor has pulled it back.
class DriftPolicy : public Policy {
 public:
  DriftPolicy(const Trajectory& traj, int drift_after) : traj_(traj), drift_after_(drift_after) {}
  std::string name() const override { return "drift"; }
  PolicyAction act(const Pose& pose, const Observation&, double) override {
    ++calls_;
    const double err = cross_track(pose, traj_).distance;
    if (err > 0.75) reached_ = true;
    if (reached_ && err < 0.2) done_ = true;
    Pose steer = pose;
    if (calls_ > drift_after_ && !done_) {
      steer.x += std::sin(pose.theta) * 1.0;
      steer.y -= std::cos(pose.theta) * 1.0;
    }
    return {expert_command(steer, traj_, {}), false};
  }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<DriftPolicy>(*this); }

 private:
  Trajectory traj_;
  int drift_after_;
  int calls_ = 0;
  bool reached_ = false;
  bool done_ = false;
};

TEST(LapExperiment, ExpertNeverNeedsHelp) {
  const Environment env = test::load_bundled("loop");
  ExpertPolicy expert(env.trajectory(0));
  LapConfig cfg;
  const LapReport rep = run_lap_experiment(expert, env, 0, cfg);
  EXPECT_EQ(rep.laps_completed, 10);
  EXPECT_TRUE(rep.interventions.empty());
  EXPECT_DOUBLE_EQ(rep.pa, 100.0);
  EXPECT_FALSE(rep.budget_exhausted);
}

TEST(LapExperiment, InjectedOffsetCausesExactlyOneIntervention) {
  const Environment env = test::load_bundled("loop");
  DriftPolicy drift(env.trajectory(0), 50);
  LapConfig cfg;
  cfg.laps = 2;
  const LapReport rep = run_lap_experiment(drift, env, 0, cfg);
  ASSERT_EQ(rep.interventions.size(), 1u);
  EXPECT_EQ(rep.interventions[0].trigger, kTriggerCrossTrack);
  EXPECT_EQ(rep.laps_completed, 2);
  double sum = 0.0;
  for (const Intervention& iv : rep.interventions) {
    EXPECT_LE(iv.start, iv.end);
    EXPECT_GE(iv.start, 0.0);
    EXPECT_LE(iv.end, rep.total_time);
    sum += iv.end - iv.start;
  }
  EXPECT_NEAR(rep.human_time, sum, cfg.dt + 1e-9);
  EXPECT_GT(rep.human_time, 0.0);
  EXPECT_LT(rep.pa, 100.0);
  EXPECT_NEAR(rep.pa, percentage_autonomy(rep.human_time, rep.total_time), 1e-12);
}

TEST(LapExperiment, RejectsOpenTrajectories) {
  const Environment env = test::load_bundled("two_crossing");
  ExpertPolicy expert(env.trajectory(0));
  EXPECT_THROW(run_lap_experiment(expert, env, 0, {}), InvalidInputError);
}

TEST(LapExperiment, TinyBudgetGivesAPartialReport) {
  const Environment env = test::load_bundled("loop");
  ExpertPolicy expert(env.trajectory(0));
  LapConfig cfg;
  cfg.step_budget_factor = 0.5;
  const LapReport rep = run_lap_experiment(expert, env, 0, cfg);
  EXPECT_TRUE(rep.budget_exhausted);
  EXPECT_LT(rep.laps_completed, cfg.laps);
}

TEST(Perturbation, ZeroMagnitudeKeepsTheWorld) {
  const Environment env = test::load_bundled("star5");
  const Environment same = perturb_environment(env, 0.0, 7);
  EXPECT_EQ(same.featurizer().hash(), env.featurizer().hash());
  ASSERT_EQ(same.landmarks().size(), env.landmarks().size());
  for (std::size_t i = 0; i < env.landmarks().size(); ++i) {
    EXPECT_EQ(same.landmarks()[i].x, env.landmarks()[i].x);
    EXPECT_EQ(same.landmarks()[i].y, env.landmarks()[i].y);
  }
  const Pose p{1.0, 2.0, 0.3};
  EXPECT_EQ(same.featurizer().encode(p), env.featurizer().encode(p));
}

TEST(Perturbation, DisplacementMatchesTheRayleighMean) {
  const Environment env = test::load_bundled("star5");
  const double magnitude = 0.2;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Environment moved = perturb_environment(env, magnitude, seed);
    for (std::size_t i = 0; i < env.landmarks().size(); ++i) {
      const double dx = moved.landmarks()[i].x - env.landmarks()[i].x;
      const double dy = moved.landmarks()[i].y - env.landmarks()[i].y;
      const double d = std::hypot(dx, dy);
      ASSERT_GT(d, 0.0);
      sum += d;
      ++count;
    }
  }
  const double expected = magnitude * std::sqrt(std::numbers::pi / 2.0);
  // Standard error of the mean is about 0.1 mm at this sample size.
  EXPECT_NEAR(sum / double(count), expected, 3e-3);
}

TEST(Perturbation, TrajectoriesAreUntouched) {
  const Environment env = test::load_bundled("four_loops");
  const Environment moved = perturb_environment(env, 0.4, 3);
  ASSERT_EQ(moved.trajectories().size(), env.trajectories().size());
  for (std::size_t i = 0; i < env.trajectories().size(); ++i) {
    const auto a = moved.trajectory(i).waypoints();
    const auto b = env.trajectory(i).waypoints();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].x, b[k].x);
      EXPECT_EQ(a[k].y, b[k].y);
    }
  }
  EXPECT_EQ(moved.intersections().size(), env.intersections().size());
  EXPECT_THROW(perturb_environment(env, -0.1, 0), InvalidInputError);
}

// A navigation graph on the two-crossing world, shared by the matrix tests.
class CrossingMatrix : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    env_ = new Environment(test::load_bundled("two_crossing"));
    GraphBuildConfig cfg;
    cfg.seed = 2;
    build_ = new NavigationBuild(build_navigation_graph(*env_, cfg));
  }
  static void TearDownTestSuite() {
    delete build_;
    delete env_;
  }
  static Environment* env_;
  static NavigationBuild* build_;
};
Environment* CrossingMatrix::env_ = nullptr;
NavigationBuild* CrossingMatrix::build_ = nullptr;

TEST_F(CrossingMatrix, MeanIsTheArithmeticMeanOfCells) {
  MatrixConfig cfg;
  cfg.seed = 4;
  const MatrixReport rep = run_navigation_matrix(build_->graph, *env_, cfg);
  EXPECT_EQ(rep.size, 2u);
  ASSERT_EQ(rep.cells.size(), 2u);
  double sum = 0.0;
  double dist = 0.0;
  for (const MatrixCell& c : rep.cells) {
    EXPECT_NE(c.src, c.dst);
    EXPECT_GE(c.pa, 0.0);
    EXPECT_LE(c.pa, 100.0);
    EXPECT_GE(c.distance, 0.0);
    sum += c.pa;
    dist += c.distance;
  }
  EXPECT_NEAR(rep.mean_pa, sum / double(rep.cells.size()), 1e-9);
  EXPECT_NEAR(rep.total_distance, dist, 1e-9);
  EXPECT_EQ(rep.cell(0, 0), nullptr);
  ASSERT_NE(rep.cell(0, 1), nullptr);
  EXPECT_EQ(rep.cell(0, 1)->src, 0u);
}

TEST_F(CrossingMatrix, EpisodeTimeIsFullyAttributed) {
  MatrixConfig cfg;
  cfg.seed = 5;
  cfg.episode.record_ticks = true;
  for (std::size_t src = 0; src < 2; ++src) {
    for (std::size_t dst = 0; dst < 2; ++dst) {
      if (src == dst) continue;
      EpisodeLog log;
      run_navigation_episode(build_->graph, *env_, src, dst, cfg, &log);
      EXPECT_DOUBLE_EQ(log.total_time, log.autonomous_time + log.human_time);
      EXPECT_GE(log.human_time, 0.0);
      EXPECT_LE(log.human_time, log.total_time);
      double sum = 0.0;
      double prev_end = 0.0;
      for (const Intervention& iv : log.interventions) {
        EXPECT_GE(iv.start, prev_end);
        EXPECT_LE(iv.end, log.total_time + 1e-9);
        sum += iv.end - iv.start;
        prev_end = iv.end;
      }
      EXPECT_NEAR(sum, log.human_time, 1e-6);
    }
  }
}

TEST_F(CrossingMatrix, ReportsAreReproducible) {
  MatrixConfig cfg;
  cfg.seed = 6;
  const std::vector<std::string> names{"a", "b"};
  const std::string first = matrix_csv(run_navigation_matrix(build_->graph, *env_, cfg), names);
  const std::string second = matrix_csv(run_navigation_matrix(build_->graph, *env_, cfg), names);
  EXPECT_EQ(first, second);
  const std::string json1 = matrix_json(run_navigation_matrix(build_->graph, *env_, cfg), names, 6);
  const std::string json2 = matrix_json(run_navigation_matrix(build_->graph, *env_, cfg), names, 6);
  EXPECT_EQ(json1, json2);
}

TEST(DegradationStudy, DeltasAreRelativeToTheFirstMagnitude) {
  const Environment env = test::load_bundled("loop");
  ExpertPolicy expert(env.trajectory(0));
  DegradationConfig cfg;
  cfg.laps.laps = 1;
  cfg.seed = 3;
  const DegradationReport rep = run_degradation_study({&expert}, env, 0, cfg);
  ASSERT_EQ(rep.rows.size(), 1u);
  ASSERT_EQ(rep.rows[0].pa.size(), cfg.magnitudes.size());
  for (std::size_t m = 0; m < cfg.magnitudes.size(); ++m) {
    EXPECT_DOUBLE_EQ(rep.rows[0].delta[m], rep.rows[0].pa[m] - rep.rows[0].pa[0]);
    EXPECT_DOUBLE_EQ(rep.rows[0].pa[m], 100.0);  // the expert ignores landmarks
  }
  const DegradationReport again = run_degradation_study({&expert}, env, 0, cfg);
  EXPECT_EQ(degradation_csv(rep), degradation_csv(again));
  EXPECT_EQ(degradation_json(rep), degradation_json(again));
}

TEST(Median, Examples) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
}

}  // namespace
}  // namespace tng
