#ifndef TNG_TNG_H
#define TNG_TNG_H

/*
 * C interface to the topological navigation graph library.
 *
 * Objects are opaque handles created by tng_*_load / tng_*_preset / training
 * calls and released with the matching tng_*_free. Every fallible call
 * returns a tng_status; on failure tng_last_error() describes the problem
 * (thread-local, valid until the next call on the same thread). Strings
 * returned through char** out-parameters are heap-allocated and must be
 * released with tng_string_free.
 *
 * Configuration is passed as a JSON object (see the README for the keys);
 * NULL selects the defaults. All randomness derives from the seed argument.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__) || defined(__clang__)
#define TNG_API __attribute__((visibility("default")))
#else
#define TNG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tng_status {
  TNG_OK = 0,
  TNG_ERR_INVALID_ARGUMENT = 1,
  TNG_ERR_PARSE = 2,
  TNG_ERR_VALIDATION = 3,
  TNG_ERR_IO = 4,
  TNG_ERR_DIMENSION = 5,
  TNG_ERR_NO_PATH = 6,
  TNG_ERR_EXPERT_LOST = 7,
  TNG_ERR_RUNTIME = 8,
  TNG_ERR_INTERNAL = 9
} tng_status;

typedef struct tng_env tng_env;
typedef struct tng_dataset tng_dataset;
typedef struct tng_model tng_model;
typedef struct tng_graph tng_graph;

typedef struct tng_env_info {
  size_t trajectories;
  size_t intersections;
  size_t landmarks;
  int navigable;
  int feature_dim;
  double noise_sigma;
  uint64_t hash;
  uint64_t featurizer_hash;
} tng_env_info;

typedef struct tng_trajectory_info {
  int id;
  int closed;
  double length;
  size_t waypoints;
} tng_trajectory_info;

TNG_API const char* tng_version(void);
TNG_API const char* tng_status_string(tng_status status);
TNG_API const char* tng_last_error(void);
TNG_API void tng_string_free(char* text);

/* Environments */
TNG_API tng_status tng_env_preset_names(char** names_out); /* newline separated */
TNG_API tng_status tng_env_preset(const char* name, uint64_t seed, double noise_sigma, tng_env** out);
TNG_API tng_status tng_env_load(const char* path, tng_env** out);
TNG_API tng_status tng_env_parse(const char* json_text, tng_env** out);
TNG_API tng_status tng_env_save(const tng_env* env, const char* path);
TNG_API tng_status tng_env_to_json(const tng_env* env, char** json_out);
TNG_API tng_status tng_env_with_noise(const tng_env* env, double noise_sigma, tng_env** out);
TNG_API tng_status tng_env_perturb(const tng_env* env, double magnitude, uint64_t seed, tng_env** out);
TNG_API tng_status tng_env_get_info(const tng_env* env, tng_env_info* info);
TNG_API tng_status tng_env_trajectory(const tng_env* env, size_t index, tng_trajectory_info* info);
TNG_API tng_status tng_env_find_trajectory(const tng_env* env, int id, size_t* index);
/* Writes feature_dim values; `capacity` is the length of `features`. */
TNG_API tng_status tng_env_observe(const tng_env* env, const double pose[3], uint64_t seed,
                                   double* features, size_t capacity);
TNG_API void tng_env_free(tng_env* env);

/* Demonstrations */
TNG_API tng_status tng_collect(const tng_env* env, size_t trajectory, const char* config_json,
                               uint64_t seed, tng_dataset** out);
TNG_API tng_status tng_dataset_load(const char* path, tng_dataset** out);
TNG_API tng_status tng_dataset_save(const tng_dataset* data, const char* path);
TNG_API size_t tng_dataset_size(const tng_dataset* data);
TNG_API int tng_dataset_feature_dim(const tng_dataset* data);
TNG_API void tng_dataset_free(tng_dataset* data);

/* Training. Shift augmentation (config "augment") needs the environment. */
TNG_API tng_status tng_train_regression(const tng_env* env, const tng_dataset* data, size_t trajectory,
                                        const char* config_json, uint64_t seed, tng_model** out);
TNG_API tng_status tng_train_detector(const tng_env* env, const tng_dataset* data, size_t trajectory,
                                      const char* config_json, uint64_t seed, tng_model** out);
TNG_API tng_status tng_train_classifier(const tng_env* env, const tng_dataset* const* per_class,
                                        size_t classes, const char* config_json, uint64_t seed,
                                        tng_model** out);
/* One DAgger iteration: roll out `learner`, relabel with the expert, aggregate
   into a copy of `data` and retrain. */
TNG_API tng_status tng_dagger(const tng_env* env, size_t trajectory, const tng_model* learner,
                              const tng_dataset* data, int iteration, const char* config_json,
                              uint64_t seed, tng_dataset** data_out, tng_model** model_out);

/* Models */
TNG_API tng_status tng_model_load(const char* path, tng_model** out);
TNG_API tng_status tng_model_save(const tng_model* model, const char* path);
/* "regression", "detection" or "classifier"; the pointer is static. */
TNG_API tng_status tng_model_kind(const tng_model* model, const char** kind);
TNG_API int tng_model_input_dim(const tng_model* model);
/* Controllers only. Detection models keep PID state between calls. */
TNG_API tng_status tng_model_act(tng_model* model, const double* features, size_t dim, double dt,
                                 double command[2], int* abstained);
TNG_API void tng_model_free(tng_model* model);

/* Graphs */
TNG_API tng_status tng_graph_assemble(const tng_env* env, const tng_model* const* controllers,
                                      size_t count, const tng_model* classifier,
                                      const char* config_json, uint64_t seed, tng_graph** out);
/* Trains every controller and the classifier, then assembles the graph. */
TNG_API tng_status tng_graph_train(const tng_env* env, const char* config_json, uint64_t seed,
                                   tng_graph** out);
TNG_API tng_status tng_graph_load(const char* path, tng_graph** out);
TNG_API tng_status tng_graph_save(const tng_graph* graph, const char* path);
TNG_API tng_status tng_graph_summary(const tng_graph* graph, char** json_out);
TNG_API size_t tng_graph_vertex_count(const tng_graph* graph);
TNG_API size_t tng_graph_edge_count(const tng_graph* graph);
/* Writes up to `capacity` vertices of the lightest src->dst path. */
TNG_API tng_status tng_graph_plan(const tng_graph* graph, size_t src, size_t dst, size_t* vertices,
                                  size_t capacity, size_t* count, double* total_weight);
TNG_API void tng_graph_free(tng_graph* graph);

/* Evaluation. Reports are `tng-report/1` JSON plus CSV; either out-pointer may be NULL. */
TNG_API tng_status tng_navigate(const tng_graph* graph, const tng_env* env, size_t src, size_t dst,
                                const char* config_json, uint64_t seed, char** episode_json);
/* `model` NULL runs the expert itself. */
TNG_API tng_status tng_eval_laps(const tng_env* env, const tng_model* model, size_t trajectory,
                                 const char* config_json, uint64_t seed, char** report_json,
                                 char** csv);
TNG_API tng_status tng_eval_matrix(const tng_graph* graph, const tng_env* env, const char* config_json,
                                   uint64_t seed, int jobs, char** report_json, char** csv);
TNG_API tng_status tng_eval_degradation(const tng_env* env, const tng_model* const* models,
                                        size_t count, size_t trajectory, const char* config_json,
                                        uint64_t seed, char** report_json, char** csv);
TNG_API tng_status tng_report_render(const char* report_json, char** text_out);

#ifdef __cplusplus
}
#endif

#endif /* TNG_TNG_H */
