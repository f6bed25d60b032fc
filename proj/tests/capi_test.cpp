#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "tng/tng.h"

namespace {

struct EnvDeleter {
  void operator()(tng_env* p) const { tng_env_free(p); }
};
struct DataDeleter {
  void operator()(tng_dataset* p) const { tng_dataset_free(p); }
};
struct ModelDeleter {
  void operator()(tng_model* p) const { tng_model_free(p); }
};
struct GraphDeleter {
  void operator()(tng_graph* p) const { tng_graph_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { tng_string_free(p); }
};
using EnvPtr = std::unique_ptr<tng_env, EnvDeleter>;
using DataPtr = std::unique_ptr<tng_dataset, DataDeleter>;
using ModelPtr = std::unique_ptr<tng_model, ModelDeleter>;
using GraphPtr = std::unique_ptr<tng_graph, GraphDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

EnvPtr preset(const char* name, double sigma = 0.0) {
  tng_env* env = nullptr;
  EXPECT_EQ(tng_env_preset(name, 1, sigma, &env), TNG_OK) << tng_last_error();
  return EnvPtr(env);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tng_capi_" + name)).string();
}

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_NE(std::string(tng_version()), "");
  EXPECT_STRNE(tng_status_string(TNG_OK), tng_status_string(TNG_ERR_IO));
}

TEST(CApi, PresetNamesListsBundledWorlds) {
  char* raw = nullptr;
  ASSERT_EQ(tng_env_preset_names(&raw), TNG_OK);
  const StringPtr names(raw);
  EXPECT_NE(std::string(names.get()).find("star5"), std::string::npos);
  EXPECT_NE(std::string(names.get()).find("two_crossing"), std::string::npos);
}

TEST(CApi, EnvironmentInfo) {
  const EnvPtr env = preset("two_crossing");
  tng_env_info info{};
  ASSERT_EQ(tng_env_get_info(env.get(), &info), TNG_OK);
  EXPECT_EQ(info.trajectories, 2u);
  EXPECT_EQ(info.intersections, 2u);
  EXPECT_EQ(info.navigable, 1);
  EXPECT_GT(info.feature_dim, 0);
  tng_trajectory_info t{};
  ASSERT_EQ(tng_env_trajectory(env.get(), 0, &t), TNG_OK);
  EXPECT_GT(t.length, 0.0);
  EXPECT_EQ(tng_env_trajectory(env.get(), 5, &t), TNG_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(tng_last_error()), "");
}

TEST(CApi, NullArgumentsAreRejected) {
  tng_env* env = nullptr;
  EXPECT_EQ(tng_env_preset(nullptr, 1, 0.0, &env), TNG_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(tng_env_preset("loop", 1, 0.0, nullptr), TNG_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(tng_env_get_info(nullptr, nullptr), TNG_ERR_INVALID_ARGUMENT);
  tng_env_free(nullptr);
  tng_string_free(nullptr);
}

TEST(CApi, ErrorsCarryCodesAndMessages) {
  tng_env* env = nullptr;
  EXPECT_EQ(tng_env_load("/no/such/world.json", &env), TNG_ERR_IO);
  EXPECT_NE(std::string(tng_last_error()).find("/no/such/world.json"), std::string::npos);
  EXPECT_EQ(tng_env_parse("{", &env), TNG_ERR_PARSE);
  EXPECT_EQ(env, nullptr);
  EXPECT_EQ(tng_env_preset("atlantis", 1, 0.0, &env), TNG_ERR_INVALID_ARGUMENT);
}

TEST(CApi, EnvironmentJsonRoundTrip) {
  const EnvPtr env = preset("star5", 0.05);
  char* raw = nullptr;
  ASSERT_EQ(tng_env_to_json(env.get(), &raw), TNG_OK);
  const StringPtr text(raw);
  tng_env* parsed = nullptr;
  ASSERT_EQ(tng_env_parse(text.get(), &parsed), TNG_OK) << tng_last_error();
  const EnvPtr back(parsed);
  tng_env_info a{}, b{};
  tng_env_get_info(env.get(), &a);
  tng_env_get_info(back.get(), &b);
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_EQ(a.noise_sigma, 0.05);
}

TEST(CApi, ObserveIsSeededAndChecksCapacity) {
  const EnvPtr env = preset("loop", 0.05);
  tng_env_info info{};
  tng_env_get_info(env.get(), &info);
  const double pose[3] = {1.0, 0.5, 0.2};
  std::vector<double> a(info.feature_dim), b(info.feature_dim);
  ASSERT_EQ(tng_env_observe(env.get(), pose, 7, a.data(), a.size()), TNG_OK);
  ASSERT_EQ(tng_env_observe(env.get(), pose, 7, b.data(), b.size()), TNG_OK);
  EXPECT_EQ(a, b);
  EXPECT_EQ(tng_env_observe(env.get(), pose, 7, a.data(), a.size() - 1), TNG_ERR_DIMENSION);
}

TEST(CApi, CollectTrainAndAct) {
  const EnvPtr env = preset("loop");
  tng_dataset* raw_data = nullptr;
  ASSERT_EQ(tng_collect(env.get(), 0, R"({"collect": {"laps": 1}})", 1, &raw_data), TNG_OK)
      << tng_last_error();
  const DataPtr data(raw_data);
  EXPECT_GT(tng_dataset_size(data.get()), 0u);

  tng_model* raw_model = nullptr;
  ASSERT_EQ(tng_train_regression(env.get(), data.get(), 0, nullptr, 1, &raw_model), TNG_OK)
      << tng_last_error();
  const ModelPtr model(raw_model);
  const char* kind = nullptr;
  ASSERT_EQ(tng_model_kind(model.get(), &kind), TNG_OK);
  EXPECT_STREQ(kind, "regression");
  const int dim = tng_model_input_dim(model.get());
  EXPECT_EQ(dim, tng_dataset_feature_dim(data.get()));

  std::vector<double> features(dim);
  const double pose[3] = {0.0, 0.0, 0.0};
  ASSERT_EQ(tng_env_observe(env.get(), pose, 1, features.data(), features.size()), TNG_OK);
  double cmd[2] = {0, 0};
  int abstained = -1;
  ASSERT_EQ(tng_model_act(model.get(), features.data(), features.size(), 0.1, cmd, &abstained), TNG_OK);
  EXPECT_EQ(abstained, 0);
  EXPECT_LE(std::abs(cmd[0]), 1.5);
  EXPECT_LE(std::abs(cmd[1]), 1.5);
  EXPECT_EQ(tng_model_act(model.get(), features.data(), features.size() - 1, 0.1, cmd, &abstained),
            TNG_ERR_DIMENSION);

  const std::string path = temp_path("model.json");
  ASSERT_EQ(tng_model_save(model.get(), path.c_str()), TNG_OK);
  tng_model* loaded = nullptr;
  ASSERT_EQ(tng_model_load(path.c_str(), &loaded), TNG_OK);
  const ModelPtr again(loaded);
  double cmd2[2] = {0, 0};
  ASSERT_EQ(tng_model_act(again.get(), features.data(), features.size(), 0.1, cmd2, &abstained), TNG_OK);
  EXPECT_EQ(cmd[0], cmd2[0]);
  EXPECT_EQ(cmd[1], cmd2[1]);
  std::remove(path.c_str());

  char* report = nullptr;
  char* csv = nullptr;
  ASSERT_EQ(tng_eval_laps(env.get(), model.get(), 0, R"({"laps": {"laps": 2}})", 1, &report, &csv), TNG_OK)
      << tng_last_error();
  const StringPtr report_ptr(report), csv_ptr(csv);
  EXPECT_NE(std::string(report).find("\"kind\""), std::string::npos);
  char* text = nullptr;
  ASSERT_EQ(tng_report_render(report, &text), TNG_OK);
  const StringPtr text_ptr(text);
  EXPECT_NE(std::string(text).find("regression"), std::string::npos);
}

TEST(CApi, UnknownConfigKeysAreRejected) {
  const EnvPtr env = preset("loop");
  tng_dataset* data = nullptr;
  EXPECT_EQ(tng_collect(env.get(), 0, R"({"colect": {}})", 1, &data), TNG_ERR_VALIDATION);
  EXPECT_EQ(data, nullptr);
  EXPECT_NE(std::string(tng_last_error()).find("colect"), std::string::npos);
}

TEST(CApi, GraphTrainPlanAndNavigate) {
  const EnvPtr env = preset("two_crossing");
  tng_graph* raw = nullptr;
  ASSERT_EQ(tng_graph_train(env.get(), nullptr, 1, &raw), TNG_OK) << tng_last_error();
  const GraphPtr graph(raw);
  EXPECT_EQ(tng_graph_vertex_count(graph.get()), 2u);
  EXPECT_EQ(tng_graph_edge_count(graph.get()), 2u);

  size_t path[4];
  size_t count = 0;
  double weight = 0.0;
  ASSERT_EQ(tng_graph_plan(graph.get(), 0, 1, path, 4, &count, &weight), TNG_OK);
  ASSERT_EQ(count, 2u);
  EXPECT_EQ(path[0], 0u);
  EXPECT_EQ(path[1], 1u);
  EXPECT_GT(weight, 0.0);
  EXPECT_EQ(tng_graph_plan(graph.get(), 0, 9, path, 4, &count, &weight), TNG_ERR_INVALID_ARGUMENT);

  char* episode = nullptr;
  ASSERT_EQ(tng_navigate(graph.get(), env.get(), 0, 1, nullptr, 3, &episode), TNG_OK) << tng_last_error();
  const StringPtr episode_ptr(episode);
  EXPECT_NE(std::string(episode).find("tng-episode/1"), std::string::npos);

  const std::string file = temp_path("graph.json");
  ASSERT_EQ(tng_graph_save(graph.get(), file.c_str()), TNG_OK) << tng_last_error();
  tng_graph* loaded = nullptr;
  ASSERT_EQ(tng_graph_load(file.c_str(), &loaded), TNG_OK) << tng_last_error();
  const GraphPtr again(loaded);
  EXPECT_EQ(tng_graph_edge_count(again.get()), 2u);
  std::filesystem::remove(file);
  std::filesystem::remove_all(temp_path("graph.models"));

  char* summary = nullptr;
  ASSERT_EQ(tng_graph_summary(graph.get(), &summary), TNG_OK);
  const StringPtr summary_ptr(summary);
  EXPECT_NE(std::string(summary).find("edges"), std::string::npos);
}

TEST(CApi, NoPathIsReported) {
  const EnvPtr env = preset("parallel");
  tng_graph* raw = nullptr;
  ASSERT_EQ(tng_graph_train(env.get(), nullptr, 1, &raw), TNG_OK) << tng_last_error();
  const GraphPtr graph(raw);
  size_t path[4];
  size_t count = 0;
  double weight = 0.0;
  EXPECT_EQ(tng_graph_plan(graph.get(), 0, 1, path, 4, &count, &weight), TNG_ERR_NO_PATH);
}

}  // namespace
