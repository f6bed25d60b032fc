#include "tng/tng.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "tng/demonstrations.hpp"
#include "tng/environment.hpp"
#include "tng/error.hpp"
#include "tng/experiments.hpp"
#include "tng/model_io.hpp"
#include "tng/pipeline.hpp"
#include "tng/reports.hpp"
#include "tng/run_config.hpp"

struct tng_env {
  tng::Environment env;
};

struct tng_dataset {
  tng::Dataset data;
};

struct tng_model {
  tng::Model model;
};

struct tng_graph {
  tng::TngGraph graph;
};

namespace {

thread_local std::string g_last_error;

tng_status to_status(tng::ErrorCode code) {
  switch (code) {
    case tng::ErrorCode::InvalidInput: return TNG_ERR_INVALID_ARGUMENT;
    case tng::ErrorCode::Parse: return TNG_ERR_PARSE;
    case tng::ErrorCode::Validation: return TNG_ERR_VALIDATION;
    case tng::ErrorCode::Io: return TNG_ERR_IO;
    case tng::ErrorCode::DimensionMismatch: return TNG_ERR_DIMENSION;
    case tng::ErrorCode::NoPath: return TNG_ERR_NO_PATH;
    case tng::ErrorCode::ExpertLost: return TNG_ERR_EXPERT_LOST;
    case tng::ErrorCode::Runtime: return TNG_ERR_RUNTIME;
  }
  return TNG_ERR_INTERNAL;
}

template <class F>
tng_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return TNG_OK;
  } catch (const tng::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TNG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TNG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TNG_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw tng::InvalidInputError(std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = copy_string(s);
}

tng::RunConfig config(const char* json, std::uint64_t seed) {
  tng::RunConfig cfg = tng::parse_run_config(json ? json : "{}");
  tng::apply_seed(cfg, seed);
  return cfg;
}

void check_trajectory(const tng::Environment& env, std::size_t index) {
  if (index >= env.trajectories().size()) {
    throw tng::InvalidInputError("trajectory index " + std::to_string(index) + " out of range (" +
                                 std::to_string(env.trajectories().size()) + " trajectories)");
  }
}

tng::Environment with_noise(const tng::Environment& env, double sigma) {
  if (!(sigma >= 0.0)) throw tng::InvalidInputError("noise_sigma must be >= 0");
  tng::EnvironmentSpec spec = env.spec();
  spec.featurizer.noise_sigma = sigma;
  return tng::Environment(std::move(spec));
}

tng::Dataset augmented(const tng::Environment& env, const tng::Dataset& data,
                       const tng::ControllerTrainConfig& tc) {
  tng::Dataset out = data;
  if (tc.augment) {
    out.append(tng::augment_dataset(data, env, tc.collect.expert, tc.shift, tng::mix_seed(tc.seed, 2)).data);
  }
  return out;
}

}  // namespace

extern "C" {

const char* tng_version(void) { return "1.0.0"; }

const char* tng_status_string(tng_status status) {
  switch (status) {
    case TNG_OK: return "ok";
    case TNG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TNG_ERR_PARSE: return "parse error";
    case TNG_ERR_VALIDATION: return "validation error";
    case TNG_ERR_IO: return "i/o error";
    case TNG_ERR_DIMENSION: return "dimension mismatch";
    case TNG_ERR_NO_PATH: return "no path";
    case TNG_ERR_EXPERT_LOST: return "expert lost";
    case TNG_ERR_RUNTIME: return "runtime error";
    case TNG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* tng_last_error(void) { return g_last_error.c_str(); }

void tng_string_free(char* text) { std::free(text); }

tng_status tng_env_preset_names(char** names_out) {
  return guarded([&] {
    need(names_out, "names_out");
    std::string all;
    for (const auto& n : tng::environment_presets()) all += n + "\n";
    *names_out = copy_string(all);
  });
}

tng_status tng_env_preset(const char* name, uint64_t seed, double noise_sigma, tng_env** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    tng::EnvironmentSpec spec = tng::preset_spec(name, seed);
    if (!(noise_sigma >= 0.0)) throw tng::InvalidInputError("noise_sigma must be >= 0");
    spec.featurizer.noise_sigma = noise_sigma;
    *out = new tng_env{tng::Environment(std::move(spec))};
  });
}

tng_status tng_env_load(const char* path, tng_env** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tng_env{tng::load_environment(path)};
  });
}

tng_status tng_env_parse(const char* json_text, tng_env** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = new tng_env{tng::parse_environment(json_text)};
  });
}

tng_status tng_env_save(const tng_env* env, const char* path) {
  return guarded([&] {
    need(env, "env");
    need(path, "path");
    tng::save_environment(env->env, path);
  });
}

tng_status tng_env_to_json(const tng_env* env, char** json_out) {
  return guarded([&] {
    need(env, "env");
    need(json_out, "json_out");
    *json_out = copy_string(tng::environment_to_string(env->env));
  });
}

tng_status tng_env_with_noise(const tng_env* env, double noise_sigma, tng_env** out) {
  return guarded([&] {
    need(env, "env");
    need(out, "out");
    *out = new tng_env{with_noise(env->env, noise_sigma)};
  });
}

tng_status tng_env_perturb(const tng_env* env, double magnitude, uint64_t seed, tng_env** out) {
  return guarded([&] {
    need(env, "env");
    need(out, "out");
    *out = new tng_env{tng::perturb_environment(env->env, magnitude, seed)};
  });
}

tng_status tng_env_get_info(const tng_env* env, tng_env_info* info) {
  return guarded([&] {
    need(env, "env");
    need(info, "info");
    const tng::Environment& e = env->env;
    info->trajectories = e.trajectories().size();
    info->intersections = e.intersections().size();
    info->landmarks = e.landmarks().size();
    info->navigable = e.navigable() ? 1 : 0;
    info->feature_dim = e.featurizer_config().feature_dim;
    info->noise_sigma = e.featurizer_config().noise_sigma;
    info->hash = e.hash();
    info->featurizer_hash = e.featurizer().hash();
  });
}

tng_status tng_env_trajectory(const tng_env* env, size_t index, tng_trajectory_info* info) {
  return guarded([&] {
    need(env, "env");
    need(info, "info");
    check_trajectory(env->env, index);
    const tng::Trajectory& t = env->env.trajectory(index);
    info->id = t.id();
    info->closed = t.closed() ? 1 : 0;
    info->length = t.length();
    info->waypoints = t.waypoints().size();
  });
}

tng_status tng_env_find_trajectory(const tng_env* env, int id, size_t* index) {
  return guarded([&] {
    need(env, "env");
    need(index, "index");
    const auto found = env->env.index_of(id);
    if (!found) throw tng::InvalidInputError("no trajectory with id " + std::to_string(id));
    *index = *found;
  });
}

tng_status tng_env_observe(const tng_env* env, const double pose[3], uint64_t seed, double* features,
                           size_t capacity) {
  return guarded([&] {
    need(env, "env");
    need(pose, "pose");
    need(features, "features");
    const auto dim = static_cast<std::size_t>(env->env.featurizer_config().feature_dim);
    if (capacity < dim) throw tng::DimensionMismatchError("feature buffer", long(dim), long(capacity));
    tng::NoiseStream stream(seed);
    const tng::Observation obs = env->env.observe({pose[0], pose[1], pose[2]}, stream);
    for (std::size_t i = 0; i < dim; ++i) features[i] = obs.features(static_cast<Eigen::Index>(i));
  });
}

void tng_env_free(tng_env* env) { delete env; }

tng_status tng_collect(const tng_env* env, size_t trajectory, const char* config_json, uint64_t seed,
                       tng_dataset** out) {
  return guarded([&] {
    need(env, "env");
    need(out, "out");
    check_trajectory(env->env, trajectory);
    const tng::RunConfig cfg = config(config_json, seed);
    tng::CollectResult r = tng::collect_demonstrations(env->env, trajectory, cfg.graph.training.collect);
    if (r.aborted) throw tng::Error(tng::ErrorCode::ExpertLost, "collection aborted: " + r.message);
    *out = new tng_dataset{std::move(r.data)};
  });
}

tng_status tng_dataset_load(const char* path, tng_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tng_dataset{tng::load_dataset(path)};
  });
}

tng_status tng_dataset_save(const tng_dataset* data, const char* path) {
  return guarded([&] {
    need(data, "data");
    need(path, "path");
    tng::save_dataset(data->data, path);
  });
}

size_t tng_dataset_size(const tng_dataset* data) { return data ? data->data.size() : 0; }

int tng_dataset_feature_dim(const tng_dataset* data) { return data ? data->data.feature_dim() : 0; }

void tng_dataset_free(tng_dataset* data) { delete data; }

tng_status tng_train_regression(const tng_env* env, const tng_dataset* data, size_t trajectory,
                                const char* config_json, uint64_t seed, tng_model** out) {
  return guarded([&] {
    need(env, "env");
    need(data, "data");
    need(out, "out");
    check_trajectory(env->env, trajectory);
    const tng::RunConfig cfg = config(config_json, seed);
    const tng::Dataset train = augmented(env->env, data->data, cfg.graph.training);
    *out = new tng_model{tng::train_regression(train, cfg.graph.training.regression,
                                               env->env.featurizer().hash())};
  });
}

tng_status tng_train_detector(const tng_env* env, const tng_dataset* data, size_t trajectory,
                              const char* config_json, uint64_t seed, tng_model** out) {
  return guarded([&] {
    need(env, "env");
    need(data, "data");
    need(out, "out");
    check_trajectory(env->env, trajectory);
    const tng::RunConfig cfg = config(config_json, seed);
    const tng::ControllerTrainConfig& tc = cfg.graph.training;
    tng::DetectionController c;
    c.detector = tng::train_detector(augmented(env->env, data->data, tc), tc.detector,
                                     env->env.featurizer().hash());
    c.pid = tng::PidState{tc.pid};
    c.cruise_speed = tc.collect.expert.cruise_speed;
    c.confidence_floor = tc.confidence_floor;
    *out = new tng_model{std::move(c)};
  });
}

tng_status tng_train_classifier(const tng_env* env, const tng_dataset* const* per_class, size_t classes,
                                const char* config_json, uint64_t seed, tng_model** out) {
  return guarded([&] {
    need(env, "env");
    need(per_class, "per_class");
    need(out, "out");
    if (classes != env->env.trajectories().size()) {
      throw tng::DimensionMismatchError("classifier datasets vs trajectories",
                                        long(env->env.trajectories().size()), long(classes));
    }
    tng::RunConfig cfg = config(config_json, seed);
    std::vector<tng::Dataset> sets;
    for (std::size_t i = 0; i < classes; ++i) {
      need(per_class[i], "per_class entry");
      tng::ControllerTrainConfig tc = cfg.graph.training;
      tc.seed = tng::mix_seed(seed, 1000 + i);
      sets.push_back(augmented(env->env, per_class[i]->data, tc));
    }
    *out = new tng_model{tng::train_trajectory_classifier(sets, cfg.graph.classifier,
                                                          env->env.featurizer().hash())};
  });
}

tng_status tng_dagger(const tng_env* env, size_t trajectory, const tng_model* learner,
                      const tng_dataset* data, int iteration, const char* config_json, uint64_t seed,
                      tng_dataset** data_out, tng_model** model_out) {
  return guarded([&] {
    need(env, "env");
    need(learner, "learner");
    need(data, "data");
    need(data_out, "data_out");
    need(model_out, "model_out");
    check_trajectory(env->env, trajectory);
    const auto* reg = std::get_if<tng::RegressionController>(&learner->model);
    if (reg == nullptr) throw tng::InvalidInputError("DAgger needs a regression model");
    const tng::RunConfig cfg = config(config_json, seed);
    const tng::ControllerTrainConfig& tc = cfg.graph.training;
    tng::DaggerConfig dc;
    dc.iteration = iteration;
    dc.dt = tc.collect.dt;
    dc.expert = tc.collect.expert;
    dc.max_deviation = tc.dagger_max_deviation;
    dc.seed = tng::mix_seed(seed, 100 + static_cast<std::uint64_t>(iteration));
    dc.steps = tng::steps_for_laps(env->env.trajectory(trajectory), tc.dagger_laps, tc.collect.expert,
                                   tc.collect.dt);
    tng::DaggerResult r = tng::dagger_iterate(*reg, env->env, trajectory, data->data, dc);
    tng::RegressionController next =
        tng::train_regression(r.data, tc.regression, env->env.featurizer().hash());
    *data_out = new tng_dataset{std::move(r.data)};
    *model_out = new tng_model{std::move(next)};
  });
}

tng_status tng_model_load(const char* path, tng_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tng_model{tng::load_model(path)};
  });
}

tng_status tng_model_save(const tng_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    tng::save_model(model->model, path);
  });
}

tng_status tng_model_kind(const tng_model* model, const char** kind) {
  return guarded([&] {
    need(model, "model");
    need(kind, "kind");
    *kind = tng::model_kind(model->model);
  });
}

int tng_model_input_dim(const tng_model* model) {
  if (model == nullptr) return 0;
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, tng::DetectionController>) return m.detector.input_dim();
        else return m.input_dim();
      },
      model->model);
}

tng_status tng_model_act(tng_model* model, const double* features, size_t dim, double dt,
                         double command[2], int* abstained) {
  return guarded([&] {
    need(model, "model");
    need(features, "features");
    need(command, "command");
    tng::Observation obs;
    obs.features = Eigen::Map<const Eigen::VectorXd>(features, static_cast<Eigen::Index>(dim));
    bool abst = false;
    tng::MotorCommand cmd;
    if (auto* r = std::get_if<tng::RegressionController>(&model->model)) {
      cmd = tng::regression_act(*r, obs);
    } else if (auto* d = std::get_if<tng::DetectionController>(&model->model)) {
      const tng::DetectionAction a = tng::detection_act(*d, obs, dt);
      cmd = a.command;
      abst = a.abstained;
    } else {
      throw tng::InvalidInputError("a classifier model cannot produce motor commands");
    }
    command[0] = cmd.linear;
    command[1] = cmd.angular;
    if (abstained) *abstained = abst ? 1 : 0;
  });
}

void tng_model_free(tng_model* model) { delete model; }

tng_status tng_graph_assemble(const tng_env* env, const tng_model* const* controllers, size_t count,
                              const tng_model* classifier, const char* config_json, uint64_t seed,
                              tng_graph** out) {
  return guarded([&] {
    need(env, "env");
    need(controllers, "controllers");
    need(classifier, "classifier");
    need(out, "out");
    const auto* clf = std::get_if<tng::TrajectoryClassifier>(&classifier->model);
    if (clf == nullptr) throw tng::InvalidInputError("classifier model is not a trajectory classifier");
    std::vector<tng::AnyController> ctl;
    for (std::size_t i = 0; i < count; ++i) {
      need(controllers[i], "controller entry");
      const tng::Model& m = controllers[i]->model;
      if (const auto* r = std::get_if<tng::RegressionController>(&m)) ctl.emplace_back(*r);
      else if (const auto* d = std::get_if<tng::DetectionController>(&m)) ctl.emplace_back(*d);
      else throw tng::InvalidInputError("controller " + std::to_string(i) + " is a classifier");
    }
    if (ctl.size() != env->env.trajectories().size()) {
      throw tng::DimensionMismatchError("controllers vs trajectories",
                                        long(env->env.trajectories().size()), long(ctl.size()));
    }
    const tng::RunConfig cfg = config(config_json, seed);
    *out = new tng_graph{tng::assemble_navigation_graph(env->env, std::move(ctl), *clf, cfg.graph).graph};
  });
}

tng_status tng_graph_train(const tng_env* env, const char* config_json, uint64_t seed, tng_graph** out) {
  return guarded([&] {
    need(env, "env");
    need(out, "out");
    const tng::RunConfig cfg = config(config_json, seed);
    *out = new tng_graph{tng::build_navigation_graph(env->env, cfg.graph).graph};
  });
}

tng_status tng_graph_load(const char* path, tng_graph** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tng_graph{tng::load_graph(path)};
  });
}

tng_status tng_graph_save(const tng_graph* graph, const char* path) {
  return guarded([&] {
    need(graph, "graph");
    need(path, "path");
    tng::save_graph(graph->graph, path);
  });
}

tng_status tng_graph_summary(const tng_graph* graph, char** json_out) {
  return guarded([&] {
    need(graph, "graph");
    need(json_out, "json_out");
    *json_out = copy_string(tng::graph_summary(graph->graph));
  });
}

size_t tng_graph_vertex_count(const tng_graph* graph) { return graph ? graph->graph.vertex_count() : 0; }

size_t tng_graph_edge_count(const tng_graph* graph) { return graph ? graph->graph.edges.size() : 0; }

tng_status tng_graph_plan(const tng_graph* graph, size_t src, size_t dst, size_t* vertices,
                          size_t capacity, size_t* count, double* total_weight) {
  return guarded([&] {
    need(graph, "graph");
    need(count, "count");
    const tng::Plan p = tng::plan(graph->graph, src, dst);
    *count = p.vertices.size();
    if (total_weight) *total_weight = p.total_weight;
    if (vertices) {
      for (std::size_t i = 0; i < p.vertices.size() && i < capacity; ++i) vertices[i] = p.vertices[i];
    }
  });
}

void tng_graph_free(tng_graph* graph) { delete graph; }

tng_status tng_navigate(const tng_graph* graph, const tng_env* env, size_t src, size_t dst,
                        const char* config_json, uint64_t seed, char** episode_json) {
  return guarded([&] {
    need(graph, "graph");
    need(env, "env");
    need(episode_json, "episode_json");
    tng::RunConfig cfg = config(config_json, seed);
    cfg.matrix.episode.record_ticks = true;
    tng::EpisodeLog log;
    tng::run_navigation_episode(graph->graph, env->env, src, dst, cfg.matrix, &log);
    *episode_json = copy_string(tng::episode_to_string(log));
  });
}

tng_status tng_eval_laps(const tng_env* env, const tng_model* model, size_t trajectory,
                         const char* config_json, uint64_t seed, char** report_json, char** csv) {
  return guarded([&] {
    need(env, "env");
    check_trajectory(env->env, trajectory);
    const tng::RunConfig cfg = config(config_json, seed);
    std::unique_ptr<tng::Policy> policy;
    if (model == nullptr) {
      policy = std::make_unique<tng::ExpertPolicy>(env->env.trajectory(trajectory),
                                                   cfg.graph.training.collect.expert);
    } else if (const auto* r = std::get_if<tng::RegressionController>(&model->model)) {
      policy = std::make_unique<tng::RegressionPolicy>(*r);
    } else if (const auto* d = std::get_if<tng::DetectionController>(&model->model)) {
      policy = std::make_unique<tng::DetectionPolicy>(*d);
    } else {
      throw tng::InvalidInputError("lap experiments need a controller model");
    }
    const tng::LapReport rep = tng::run_lap_experiment(*policy, env->env, trajectory, cfg.laps);
    const std::string name = env->env.trajectory(trajectory).name();
    emit(report_json, tng::lap_reports_json({rep}, name, seed));
    emit(csv, tng::lap_reports_csv({rep}, name));
  });
}

tng_status tng_eval_matrix(const tng_graph* graph, const tng_env* env, const char* config_json,
                           uint64_t seed, int jobs, char** report_json, char** csv) {
  return guarded([&] {
    need(graph, "graph");
    need(env, "env");
    tng::RunConfig cfg = config(config_json, seed);
    if (jobs > 0) cfg.matrix.jobs = jobs;
    const tng::MatrixReport rep = tng::run_navigation_matrix(graph->graph, env->env, cfg.matrix);
    std::vector<std::string> names;
    for (const auto& t : env->env.trajectories()) names.push_back(t.name());
    emit(report_json, tng::matrix_json(rep, names, seed));
    emit(csv, tng::matrix_csv(rep, names));
  });
}

tng_status tng_eval_degradation(const tng_env* env, const tng_model* const* models, size_t count,
                                size_t trajectory, const char* config_json, uint64_t seed,
                                char** report_json, char** csv) {
  return guarded([&] {
    need(env, "env");
    need(models, "models");
    check_trajectory(env->env, trajectory);
    const tng::RunConfig cfg = config(config_json, seed);
    std::vector<std::unique_ptr<tng::Policy>> owned;
    std::vector<tng::Policy*> policies;
    for (std::size_t i = 0; i < count; ++i) {
      need(models[i], "model entry");
      const tng::Model& m = models[i]->model;
      if (const auto* r = std::get_if<tng::RegressionController>(&m)) {
        owned.push_back(std::make_unique<tng::RegressionPolicy>(*r));
      } else if (const auto* d = std::get_if<tng::DetectionController>(&m)) {
        owned.push_back(std::make_unique<tng::DetectionPolicy>(*d));
      } else {
        throw tng::InvalidInputError("degradation study needs controller models");
      }
      policies.push_back(owned.back().get());
    }
    const tng::DegradationReport rep =
        tng::run_degradation_study(policies, env->env, trajectory, cfg.degradation);
    emit(report_json, tng::degradation_json(rep));
    emit(csv, tng::degradation_csv(rep));
  });
}

tng_status tng_report_render(const char* report_json, char** text_out) {
  return guarded([&] {
    need(report_json, "report_json");
    need(text_out, "text_out");
    *text_out = copy_string(tng::render_report(report_json));
  });
}

}  // extern "C"
