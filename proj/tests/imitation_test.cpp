#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "tng/demonstrations.hpp"
#include "tng/error.hpp"
#include "tng/experiments.hpp"
#include "tng/expert.hpp"
#include "tng/pipeline.hpp"
#include "tng/regression_controller.hpp"
#include "tng/ridge.hpp"

namespace tng {
namespace {

Trajectory straight_path() { return Trajectory(0, "s", {{0, 0}, {10, 0}, {20, 0}}, false); }

TEST(ExpertCommand, AlignedOnStraightSegment) {
  const ExpertConfig cfg;
  const MotorCommand c = expert_command({5, 0, 0}, straight_path(), cfg);
  EXPECT_NEAR(c.angular, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(c.linear, cfg.cruise_speed);
}

TEST(ExpertCommand, LookaheadToTheLeftTurnsLeft) {
  const ExpertConfig cfg;
  // Heading 30 degrees right of the path puts the lookahead point to the left.
  const MotorCommand c = expert_command({5, 0, -kPi / 6}, straight_path(), cfg);
  EXPECT_GT(c.angular, 0.0);
}

TEST(ExpertCommand, MatchesCurvatureFormula) {
  const Environment env = make_preset("star5");
  ExpertConfig cfg;
  cfg.max_angular = 100.0;  // keep the law unclipped for the oracle
  std::mt19937_64 rng(17);
  for (const Trajectory& traj : env.trajectories()) {
    std::uniform_real_distribution<double> ua(0, traj.length());
    for (int i = 0; i < 100; ++i) {
      const Pose p = traj.pose_at(ua(rng));
      // Independent bearing: lookahead point from the nearest arc.
      const double arc = cross_track(p, traj).arc_position;
      const Vec2 target = traj.point_at(traj.wrap_arc(arc + cfg.lookahead));
      const double alpha =
          normalize_angle(std::atan2(target.y - p.y, target.x - p.x) - p.theta);
      const MotorCommand c = expert_command(p, traj, cfg);
      EXPECT_NEAR(c.angular, 2 * cfg.cruise_speed * std::sin(alpha) / cfg.lookahead, 1e-9);
    }
  }
}

TEST(ExpertCommand, ClipsAndLosesTrack) {
  const ExpertConfig cfg;
  const MotorCommand c = expert_command({5, 0, kPi / 2 + 0.3}, straight_path(), cfg);
  EXPECT_LE(std::abs(c.angular), cfg.max_angular);
  EXPECT_THROW(expert_command({5, 6, 0}, straight_path(), cfg), ExpertLostError);
  EXPECT_FALSE(try_expert_command({5, 6, 0}, straight_path(), cfg).has_value());
}

TEST(CollectDemonstrations, SquareLoopRecordsEverySimStep) {
  const Environment env = make_preset("square");
  CollectConfig cfg;
  cfg.laps = 3;
  const CollectResult r = collect_demonstrations(env, 0, cfg);
  ASSERT_FALSE(r.aborted) << r.message;
  EXPECT_EQ(r.laps_completed, 3);
  const auto prov = r.data.provenance();
  ASSERT_EQ(prov.size(), 1u);
  EXPECT_EQ(prov[0].source, kSourceExpertLap);
  EXPECT_EQ(prov[0].count, r.data.size());

  // Replay the expert independently and count steps until three laps of progress.
  const Trajectory& traj = env.trajectory(0);
  Pose pose = traj.pose_at(0.0);
  ProgressTracker tracker(traj, pose);
  std::size_t steps = 0;
  while (tracker.progress() < 3 * traj.length()) {
    ASSERT_LT(steps, r.data.size());
    EXPECT_EQ(r.data[steps].pose, pose);
    pose = step_unicycle(pose, expert_command(pose, traj, cfg.expert), cfg.dt);
    tracker.update(pose);
    ++steps;
  }
  EXPECT_EQ(r.data.size(), steps);
}

TEST(CollectDemonstrations, OneLapIsAPrefixOfTwo) {
  const Environment env = test::with_noise(make_preset("loop"), 0.05);
  CollectConfig one;
  one.laps = 1;
  one.seed = 9;
  CollectConfig two = one;
  two.laps = 2;
  const CollectResult a = collect_demonstrations(env, 0, one);
  const CollectResult b = collect_demonstrations(env, 0, two);
  ASSERT_GT(b.data.size(), a.data.size());
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    EXPECT_EQ(a.data[i].pose, b.data[i].pose);
    EXPECT_EQ(a.data[i].observation.features, b.data[i].observation.features);
  }
}

TEST(CollectDemonstrations, ClosedLoopLapsEndNearTheStart) {
  for (const char* name : {"loop", "square", "star5"}) {
    const Environment env = make_preset(name);
    for (std::size_t i = 0; i < env.trajectories().size(); ++i) {
      CollectConfig cfg;
      const CollectResult r = collect_demonstrations(env, i, cfg);
      ASSERT_EQ(r.lap_end_poses.size(), 3u);
      const Pose start = env.trajectory(i).pose_at(0.0);
      for (const Pose& end : r.lap_end_poses) {
        EXPECT_LT(distance(end.position(), start.position()), 0.2) << name << " " << i;
      }
    }
  }
}

TEST(CollectDemonstrations, OpenPathsRestartEachPass) {
  const Environment env = make_preset("straight");
  CollectConfig cfg;
  cfg.laps = 2;
  const CollectResult r = collect_demonstrations(env, 0, cfg);
  ASSERT_EQ(r.laps_completed, 2);
  const std::size_t half = r.data.size() / 2;
  EXPECT_EQ(r.data[0].pose, r.data[half].pose);
}

TEST(CollectDemonstrations, RejectsZeroLaps) {
  CollectConfig cfg;
  cfg.laps = 0;
  EXPECT_THROW(collect_demonstrations(make_preset("loop"), 0, cfg), InvalidInputError);
}

DemoSample sample_at(const Environment& env, const Pose& pose, const ExpertConfig& expert) {
  NoiseStream s(0);
  return {env.observe(pose, s), expert_command(pose, env.trajectory(0), expert), pose, 0,
          kSourceExpertLap};
}

TEST(AugmentShift, ZeroShiftIsIdentityWithoutNoise) {
  const Environment env = make_preset("straight");
  const ExpertConfig expert;
  const DemoSample s = sample_at(env, {10, 0, 0}, expert);
  NoiseStream stream(3);
  const auto a = augment_shift(s, 0.0, 0.0, env, expert, stream);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->observation.features, s.observation.features);
  EXPECT_EQ(a->command, s.command);
  EXPECT_EQ(a->source, kSourceAugmentation);
}

TEST(AugmentShift, YawLeftSteersBackRight) {
  const Environment env = make_preset("straight");
  const ExpertConfig expert;
  const DemoSample s = sample_at(env, {10, 0, 0}, expert);
  NoiseStream stream(3);
  const auto a = augment_shift(s, 0.0, 0.2, env, expert, stream);
  ASSERT_TRUE(a.has_value());
  EXPECT_LT(a->command.angular, s.command.angular);
  EXPECT_NEAR(a->pose.theta, 0.2, 1e-12);
}

TEST(AugmentShift, LateralShiftMovesLeftOfHeading) {
  const Environment env = make_preset("straight");
  const ExpertConfig expert;
  const DemoSample s = sample_at(env, {10, 0, 0}, expert);
  NoiseStream stream(3);
  const auto a = augment_shift(s, 0.3, 0.0, env, expert, stream);
  ASSERT_TRUE(a.has_value());
  EXPECT_NEAR(a->pose.y, 0.3, 1e-12);
  EXPECT_LT(a->command.angular, 0.0);
}

TEST(AugmentShift, EnforcesConfiguredBounds) {
  const Environment env = make_preset("straight");
  const ExpertConfig expert;
  const DemoSample s = sample_at(env, {10, 0, 0}, expert);
  NoiseStream stream(3);
  EXPECT_THROW(augment_shift(s, 0.6, 0.0, env, expert, stream), InvalidInputError);
  EXPECT_THROW(augment_shift(s, 0.0, 0.5, env, expert, stream), InvalidInputError);
}

TEST(AugmentShift, CommandsStayWithinClip) {
  const Environment env = make_preset("loop");
  CollectConfig cfg;
  cfg.laps = 1;
  const Dataset base = collect_demonstrations(env, 0, cfg).data;
  ShiftConfig shift;
  shift.copies = 3;
  const AugmentResult r = augment_dataset(base, env, cfg.expert, shift, 5);
  EXPECT_EQ(r.data.size() + r.skipped, 3 * base.size());
  for (const DemoSample& s : r.data.samples()) {
    EXPECT_LE(std::abs(s.command.linear), kCommandClip);
    EXPECT_LE(std::abs(s.command.angular), kCommandClip);
  }
}

TEST(FeatureAugmentations, KeepLabelsAndShape) {
  const Environment env = make_preset("loop");
  CollectConfig cfg;
  cfg.laps = 1;
  const Dataset base = collect_demonstrations(env, 0, cfg).data;
  const Dataset noisy = augment_feature_noise(base, 0.1, 2, 1);
  const Dataset masked = augment_dropout(base, 0.25, 1, 1);
  ASSERT_EQ(noisy.size(), 2 * base.size());
  ASSERT_EQ(masked.size(), base.size());
  EXPECT_EQ(noisy[0].command, base[0].command);
  EXPECT_EQ(masked[0].command, base[0].command);
  const Eigen::VectorXd& m = masked[0].observation.features;
  EXPECT_GT((m.array() == 0.0).count(), 0);
}

TEST(Ridge, SingleFeatureExactFit) {
  Eigen::MatrixXd x(2, 1), y(2, 1);
  x << 1, 1;
  y << 1, 1;
  EXPECT_NEAR(solve_ridge(x, y, 1e-12, false).weights(0, 0), 1.0, 1e-9);
}

TEST(Ridge, SingleFeatureClosedFormOracle) {
  Eigen::MatrixXd x(2, 1), y(2, 1);
  x << 1, 1;
  y << 1, 1;
  EXPECT_NEAR(solve_ridge(x, y, 1.0, false).weights(0, 0), 2.0 / 3.0, 1e-12);
}

TEST(Ridge, RejectsNonPositiveLambda) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 2);
  Eigen::MatrixXd y = Eigen::MatrixXd::Ones(3, 1);
  EXPECT_THROW(solve_ridge(x, y, 0.0), InvalidInputError);
  EXPECT_THROW(solve_ridge(x, y, -1.0), InvalidInputError);
}

struct Problem {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
};

Problem random_problem(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> g;
  Problem p{Eigen::MatrixXd(n, d), Eigen::MatrixXd(n, 2)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) p.x(i, j) = g(rng);
    for (int j = 0; j < 2; ++j) p.y(i, j) = g(rng);
  }
  return p;
}

double parameter_norm(const LinearHead& h) {
  return std::sqrt(h.weights.squaredNorm() + h.bias.squaredNorm());
}

TEST(Ridge, HugeLambdaShrinksTowardZero) {
  std::mt19937_64 rng(1);
  const Problem p = random_problem(rng, 50, 8);
  const double small = parameter_norm(solve_ridge(p.x, p.y, 1.0));
  const double big = parameter_norm(solve_ridge(p.x, p.y, 1e6));
  EXPECT_LT(big, 1e-3 * small);
}

TEST(Ridge, ClosedFormBeatsRandomPerturbations) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const Problem p = random_problem(rng, 80, 6);
  const LinearHead best = solve_ridge(p.x, p.y, 0.5);
  const double f0 = ridge_objective(best, p.x, p.y, 0.5);
  for (int k = 0; k < 100; ++k) {
    LinearHead h = best;
    for (int i = 0; i < h.weights.size(); ++i) h.weights.data()[i] += 1e-3 * g(rng);
    for (int i = 0; i < h.bias.size(); ++i) h.bias[i] += 1e-3 * g(rng);
    EXPECT_LE(f0, ridge_objective(h, p.x, p.y, 0.5));
  }
}

TEST(Ridge, GradientModesMatchClosedForm) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 20 + static_cast<int>(rng() % 181);
    const int d = 1 + static_cast<int>(rng() % 32);
    const Problem p = random_problem(rng, n, d);
    const LinearHead exact = solve_ridge(p.x, p.y, 1.0);
    for (Optimizer opt : {Optimizer::Adam, Optimizer::Momentum}) {
      GradientConfig cfg;
      cfg.seed = trial;
      const LinearFit fit = fit_ridge_gradient(p.x, p.y, 1.0, opt, cfg);
      EXPECT_LT((fit.head.weights - exact.weights).cwiseAbs().maxCoeff(), 1e-4);
      EXPECT_LT((fit.head.bias - exact.bias).cwiseAbs().maxCoeff(), 1e-4);
    }
  }
}

TEST(Ridge, FullBatchLossIsNonIncreasing) {
  std::mt19937_64 rng(4);
  const Problem p = random_problem(rng, 100, 10);
  GradientConfig cfg;
  cfg.steps = 2000;
  const LinearFit fit = fit_ridge_gradient(p.x, p.y, 1.0, Optimizer::Momentum, cfg);
  ASSERT_GT(fit.loss_trace.size(), 10u);
  for (std::size_t i = 1; i < fit.loss_trace.size(); ++i) {
    EXPECT_LE(fit.loss_trace[i], fit.loss_trace[i - 1] * (1 + 1e-12));
  }
}

TEST(Ridge, MiniBatchLossTrendsDown) {
  std::mt19937_64 rng(5);
  const Problem p = random_problem(rng, 200, 10);
  GradientConfig cfg;
  cfg.steps = 3000;
  cfg.batch = 32;
  cfg.rate = 0.01;
  const LinearFit fit = fit_ridge_gradient(p.x, p.y, 1.0, Optimizer::Adam, cfg);
  ASSERT_GT(fit.loss_trace.size(), 2u);
  EXPECT_LT(fit.loss_trace.back(), fit.loss_trace.front());
  const double exact = ridge_objective(solve_ridge(p.x, p.y, 1.0), p.x, p.y, 1.0);
  EXPECT_LT(fit.loss_trace.back(), 1.05 * exact);
}

TEST(Ridge, MlpTrainingLossIsNonIncreasing) {
  std::mt19937_64 rng(6);
  const Problem p = random_problem(rng, 60, 5);
  GradientConfig cfg;
  cfg.steps = 500;
  const MlpFit fit = fit_mlp(p.x, p.y, 1e-3, {32}, cfg);
  EXPECT_EQ(fit.head.sizes, (std::vector<int>{5, 32, 2}));
  for (std::size_t i = 1; i < fit.loss_trace.size(); ++i) {
    EXPECT_LE(fit.loss_trace[i], fit.loss_trace[i - 1] * (1 + 1e-12));
  }
  EXPECT_NEAR(fit.loss_trace.back(), ridge_objective(fit.head, p.x, p.y, 1e-3), 1e-6);
}

RegressionController linear_controller(Eigen::MatrixXd w, Eigen::VectorXd b) {
  RegressionController c;
  c.head = LinearHead{std::move(w), std::move(b), true};
  return c;
}

TEST(RegressionAct, ZeroHeadGivesZeroCommand) {
  const RegressionController c =
      linear_controller(Eigen::MatrixXd::Zero(4, 2), Eigen::VectorXd::Zero(2));
  const MotorCommand m = regression_act(c, {Eigen::VectorXd::Ones(4), 0.0});
  EXPECT_EQ(m, (MotorCommand{0.0, 0.0}));
}

TEST(RegressionAct, ClipsEachComponent) {
  Eigen::VectorXd b(2);
  b << 3.0, -2.0;
  const RegressionController c = linear_controller(Eigen::MatrixXd::Zero(4, 2), b);
  const MotorCommand m = regression_act(c, {Eigen::VectorXd::Ones(4), 0.0});
  EXPECT_EQ(m, (MotorCommand{1.5, -1.5}));
}

TEST(RegressionAct, MatchesMatrixOracle) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 40);
    Eigen::MatrixXd w(d, 2);
    Eigen::VectorXd b(2), x(d);
    for (int i = 0; i < w.size(); ++i) w.data()[i] = 0.3 * g(rng);
    for (int i = 0; i < 2; ++i) b[i] = 0.3 * g(rng);
    for (int i = 0; i < d; ++i) x[i] = g(rng);
    const MotorCommand m = regression_act(linear_controller(w, b), {x, 0.0});
    double raw[2];
    for (int k = 0; k < 2; ++k) {
      raw[k] = b[k];
      for (int i = 0; i < d; ++i) raw[k] += w(i, k) * x[i];
    }
    EXPECT_NEAR(m.linear, std::clamp(raw[0], -1.5, 1.5), 1e-12);
    EXPECT_NEAR(m.angular, std::clamp(raw[1], -1.5, 1.5), 1e-12);
  }
}

TEST(RegressionAct, DimensionMismatchThrows) {
  const RegressionController c =
      linear_controller(Eigen::MatrixXd::Zero(4, 2), Eigen::VectorXd::Zero(2));
  EXPECT_THROW(regression_act(c, {Eigen::VectorXd::Ones(5), 0.0}), DimensionMismatchError);
}

TEST(RegressionAct, FuzzedObservationsStayWithinClip) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  Eigen::MatrixXd w(16, 2);
  for (int i = 0; i < w.size(); ++i) w.data()[i] = g(rng);
  RegressionTrainConfig mlp_cfg;
  mlp_cfg.head = HeadKind::Mlp;
  mlp_cfg.gradient.steps = 50;
  Dataset tiny(16);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd f(16);
    for (int k = 0; k < 16; ++k) f[k] = g(rng);
    tiny.add({{f, 0.0}, {0.5, 0.2 * g(rng)}, {}, 0, kSourceExpertLap});
  }
  const RegressionController mlp = train_regression(tiny, mlp_cfg, 0);
  const RegressionController lin = linear_controller(w, Eigen::VectorXd::Zero(2));
  for (int trial = 0; trial < 10000; ++trial) {
    Eigen::VectorXd x(16);
    for (int k = 0; k < 16; ++k) x[k] = 100 * g(rng);
    for (const RegressionController* c : {&lin, &mlp}) {
      const MotorCommand m = regression_act(*c, {x, 0.0});
      ASSERT_LE(std::abs(m.linear), kCommandClip);
      ASSERT_LE(std::abs(m.angular), kCommandClip);
    }
  }
}

TEST(TrainRegression, RejectsEmptyDataAndBadLambda) {
  RegressionTrainConfig cfg;
  EXPECT_THROW(train_regression(Dataset(4), cfg, 0), InvalidInputError);
  Dataset one(2);
  one.add({{Eigen::VectorXd::Ones(2), 0.0}, {0.5, 0.0}, {}, 0, kSourceExpertLap});
  cfg.lambda = 0.0;
  EXPECT_THROW(train_regression(one, cfg, 0), InvalidInputError);
}

TEST(TrainRegression, ConflictingDuplicatesAverage) {
  Dataset data(1);
  Eigen::VectorXd f(1);
  f << 1.0;
  data.add({{f, 0.0}, {0.2, 1.0}, {}, 0, kSourceExpertLap});
  data.add({{f, 0.0}, {0.4, -1.0}, {}, 0, kSourceExpertLap});
  RegressionTrainConfig cfg;
  cfg.lambda = 1e-9;
  const RegressionController c = train_regression(data, cfg, 0);
  const MotorCommand m = regression_act(c, {f, 0.0});
  EXPECT_NEAR(m.linear, 0.3, 1e-6);
  EXPECT_NEAR(m.angular, 0.0, 1e-6);
}

TEST(Dataset, ValidatesSamples) {
  Dataset d(3);
  EXPECT_THROW(d.add({{Eigen::VectorXd::Ones(2), 0.0}, {}, {}, 0, kSourceExpertLap}),
               DimensionMismatchError);
  EXPECT_THROW(d.add({{Eigen::VectorXd::Ones(3), 0.0}, {2.0, 0.0}, {}, 0, kSourceExpertLap}),
               InvalidInputError);
  EXPECT_THROW(d.add({{Eigen::VectorXd::Ones(3), 0.0}, {}, {}, 0, "mystery"}), InvalidInputError);
}

TEST(Dataset, JsonLinesRoundTrip) {
  const Environment env = test::with_noise(make_preset("loop"), 0.05);
  CollectConfig cfg;
  cfg.laps = 1;
  Dataset data = collect_demonstrations(env, 0, cfg).data;
  const AugmentResult aug = augment_dataset(data, env, cfg.expert, {}, 1);
  data.append(aug.data);
  const std::string text = dataset_to_string(data);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            R"({"feature_dim":128,"format":"tng-dataset/1"})");
  const Dataset back = parse_dataset(text);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].observation.features, data[i].observation.features);
    EXPECT_EQ(back[i].command, data[i].command);
    EXPECT_EQ(back[i].pose, data[i].pose);
    EXPECT_EQ(back[i].source, data[i].source);
  }
  EXPECT_EQ(dataset_to_string(back), text);
  const auto prov = back.provenance();
  ASSERT_EQ(prov.size(), 2u);
  EXPECT_EQ(prov[1].source, kSourceAugmentation);
  EXPECT_THROW(parse_dataset("{\"format\":\"tng-dataset/1\"}\n"), ParseError);
}

class DaggerIterate : public ::testing::Test {
 protected:
  void SetUp() override {
    CollectConfig cfg;
    base_ = collect_demonstrations(env_, 0, cfg).data;
    learner_ = train_regression(base_, {}, env_.featurizer().hash());
  }
  Environment env_ = make_preset("loop");
  Dataset base_;
  RegressionController learner_;
};

TEST_F(DaggerIterate, SizeIsBasePlusLabelledRollout) {
  DaggerConfig cfg;
  cfg.steps = 300;
  cfg.iteration = 2;
  const DaggerResult r = dagger_iterate(learner_, env_, 0, base_, cfg);
  EXPECT_EQ(r.data.size(), base_.size() + r.rollout_steps - r.expert_lost_skips);
  EXPECT_LE(r.rollout_steps, 300u);
  if (!r.truncated) {
    EXPECT_EQ(r.rollout_steps, 300u);
  }
  const auto prov = r.data.provenance();
  EXPECT_EQ(prov.back().source, "dagger-iteration-2");
}

TEST_F(DaggerIterate, LabelsAgreeWithTheExpert) {
  DaggerConfig cfg;
  cfg.steps = 200;
  const DaggerResult r = dagger_iterate(learner_, env_, 0, base_, cfg);
  for (std::size_t i = base_.size(); i < r.data.size(); ++i) {
    const DemoSample& s = r.data[i];
    EXPECT_EQ(s.command, expert_command(s.pose, env_.trajectory(0), cfg.expert));
  }
}

TEST_F(DaggerIterate, RejectsZeroSteps) {
  DaggerConfig cfg;
  cfg.steps = 0;
  EXPECT_THROW(dagger_iterate(learner_, env_, 0, base_, cfg), InvalidInputError);
}

// Median cross-track error of each retrained controller on the noiseless
// square loop, median over five seeds, must not grow across DAgger iterations.
TEST(DaggerStudy, SquareLoopCrossTrackIsNonIncreasing) {
  const Environment env = make_preset("square");
  const int iterations = 3;
  std::vector<std::vector<double>> per_iteration(iterations + 1);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ControllerTrainConfig cfg;
    cfg.seed = seed;
    cfg.augment = false;
    cfg.dagger_iterations = iterations;
    train_regression_pipeline(env, 0, cfg, [&](int it, const RegressionController& c) {
      RegressionPolicy policy(c);
      LapConfig laps;
      laps.laps = 3;
      laps.seed = seed;
      laps.start_arc = env.trajectory(0).length() * double(seed - 1) / 5.0;
      per_iteration[it].push_back(run_lap_experiment(policy, env, 0, laps).median_cross_track);
    });
  }
  std::vector<double> medians;
  for (const auto& values : per_iteration) medians.push_back(median(values));
  for (int it = 1; it <= iterations; ++it) {
    EXPECT_LE(medians[it], medians[it - 1]) << "iteration " << it;
  }
}

}  // namespace
}  // namespace tng
