// Command-line front end over the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "tng/tng.h"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(tng_status s) {
  if (s != TNG_OK) {
    throw RuntimeFailure(std::string(tng_status_string(s)) + ": " + tng_last_error());
  }
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using EnvPtr = std::unique_ptr<tng_env, Deleter<tng_env, tng_env_free>>;
using DataPtr = std::unique_ptr<tng_dataset, Deleter<tng_dataset, tng_dataset_free>>;
using ModelPtr = std::unique_ptr<tng_model, Deleter<tng_model, tng_model_free>>;
using GraphPtr = std::unique_ptr<tng_graph, Deleter<tng_graph, tng_graph_free>>;

std::string take(char* s) {
  std::string out = s ? s : "";
  tng_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw RuntimeFailure("failed writing '" + path.string() + "'");
}

struct Globals {
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out = ".";
  int jobs = 1;
  json config = json::object();

  void load_config() {
    if (config_path.empty()) return;
    try {
      config = json::parse(read_file(config_path));
    } catch (const json::parse_error& e) {
      throw RuntimeFailure(config_path + ": " + e.what());
    }
    if (!config.is_object()) throw RuntimeFailure(config_path + ": config must be a JSON object");
    if (config.contains("seed") && config["seed"].is_number_unsigned()) {
      seed = config["seed"].get<std::uint64_t>();
    }
  }
  fs::path out_dir() const {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw RuntimeFailure("cannot create output directory '" + out + "': " + ec.message());
    return fs::path(out);
  }
  std::string config_text() const { return config.dump(); }
};

EnvPtr load_env(const std::string& path) {
  tng_env* e = nullptr;
  check(tng_env_load(path.c_str(), &e));
  return EnvPtr(e);
}

DataPtr load_data(const std::string& path) {
  tng_dataset* d = nullptr;
  check(tng_dataset_load(path.c_str(), &d));
  return DataPtr(d);
}

ModelPtr load_model(const std::string& path) {
  tng_model* m = nullptr;
  check(tng_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

GraphPtr load_graph(const std::string& path) {
  tng_graph* g = nullptr;
  check(tng_graph_load(path.c_str(), &g));
  return GraphPtr(g);
}

std::size_t trajectory_index(const tng_env* env, int id) {
  std::size_t index = 0;
  check(tng_env_find_trajectory(env, id, &index));
  return index;
}

std::vector<int> trajectory_ids(const tng_env* env) {
  tng_env_info info{};
  check(tng_env_get_info(env, &info));
  std::vector<int> ids;
  for (std::size_t i = 0; i < info.trajectories; ++i) {
    tng_trajectory_info t{};
    check(tng_env_trajectory(env, i, &t));
    ids.push_back(t.id);
  }
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  CLI::App app{"Topological navigation graph toolkit"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", g.seed, "Seed for every random draw");
  app.add_option("--config", g.config_path, "RunConfig JSON file");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--jobs", g.jobs, "Concurrent episodes for eval matrix")->check(CLI::PositiveNumber);

  std::function<void()> action;

  // env gen | validate
  auto* env_cmd = app.add_subcommand("env", "Generate or validate environment files");
  env_cmd->require_subcommand(1);
  std::string preset;
  double noise = 0.0;
  std::string file_name;
  auto* env_gen = env_cmd->add_subcommand("gen", "Write a bundled environment layout");
  env_gen->add_option("--preset", preset, "Layout name")->required();
  env_gen->add_option("--noise", noise, "Observation noise sigma")->check(CLI::NonNegativeNumber);
  env_gen->add_option("--name", file_name, "Output file name (default <preset>.json)");
  env_gen->callback([&] {
    action = [&] {
      tng_env* e = nullptr;
      check(tng_env_preset(preset.c_str(), g.seed, noise, &e));
      EnvPtr env(e);
      const fs::path path = g.out_dir() / (file_name.empty() ? preset + ".json" : file_name);
      check(tng_env_save(env.get(), path.string().c_str()));
      std::cout << "wrote " << path.string() << "\n";
    };
  });
  std::string env_path;
  auto* env_validate = env_cmd->add_subcommand("validate", "Check an environment file");
  env_validate->add_option("env", env_path, "Environment file")->required();
  env_validate->callback([&] {
    action = [&] {
      EnvPtr env = load_env(env_path);
      tng_env_info info{};
      check(tng_env_get_info(env.get(), &info));
      std::cout << "trajectories: " << info.trajectories << "\n"
                << "intersections: " << info.intersections << "\n"
                << "landmarks: " << info.landmarks << "\n"
                << "navigable: " << (info.navigable ? "true" : "false") << "\n";
    };
  });

  // collect
  int trajectory = -1;
  int laps = 0;
  auto* collect = app.add_subcommand("collect", "Record expert demonstrations");
  collect->add_option("--env", env_path, "Environment file")->required();
  collect->add_option("--trajectory", trajectory, "Trajectory id (default: all)");
  collect->add_option("--laps", laps, "Laps per trajectory (default 3)")->check(CLI::PositiveNumber);
  collect->callback([&] {
    action = [&] {
      if (laps > 0) g.config["collect"]["laps"] = laps;
      EnvPtr env = load_env(env_path);
      std::vector<int> ids = trajectory >= 0 ? std::vector<int>{trajectory} : trajectory_ids(env.get());
      const fs::path dir = g.out_dir();
      for (int id : ids) {
        tng_dataset* d = nullptr;
        check(tng_collect(env.get(), trajectory_index(env.get(), id), g.config_text().c_str(), g.seed, &d));
        DataPtr data(d);
        const fs::path path = dir / ("dataset_" + std::to_string(id) + ".jsonl");
        check(tng_dataset_save(data.get(), path.string().c_str()));
        std::cout << "wrote " << path.string() << " (" << tng_dataset_size(data.get()) << " samples)\n";
      }
    };
  });

  // train regression | detector | classifier
  auto* train = app.add_subcommand("train", "Fit controllers and classifiers");
  train->require_subcommand(1);
  std::vector<std::string> data_paths;
  auto add_controller_train = [&](const char* name, const char* help, bool detector) {
    auto* sub = train->add_subcommand(name, help);
    sub->add_option("--env", env_path, "Environment file")->required();
    sub->add_option("--data", data_paths, "Dataset file")->required()->expected(1);
    sub->add_option("--trajectory", trajectory, "Trajectory id")->required();
    sub->callback([&, detector] {
      action = [&, detector] {
        EnvPtr env = load_env(env_path);
        DataPtr data = load_data(data_paths.front());
        const std::size_t index = trajectory_index(env.get(), trajectory);
        tng_model* m = nullptr;
        if (detector) {
          check(tng_train_detector(env.get(), data.get(), index, g.config_text().c_str(), g.seed, &m));
        } else {
          check(tng_train_regression(env.get(), data.get(), index, g.config_text().c_str(), g.seed, &m));
        }
        ModelPtr model(m);
        const fs::path path =
            g.out_dir() / (std::string(detector ? "detector_" : "regression_") + std::to_string(trajectory) + ".json");
        check(tng_model_save(model.get(), path.string().c_str()));
        std::cout << "wrote " << path.string() << "\n";
      };
    });
  };
  add_controller_train("regression", "Ridge-regression behaviour cloning", false);
  add_controller_train("detector", "Direction detector with PID steering", true);
  auto* train_clf = train->add_subcommand("classifier", "Softmax trajectory classifier");
  train_clf->add_option("--env", env_path, "Environment file")->required();
  train_clf->add_option("--data", data_paths, "One dataset per trajectory, in trajectory order")->required();
  train_clf->callback([&] {
    action = [&] {
      EnvPtr env = load_env(env_path);
      std::vector<DataPtr> owned;
      std::vector<const tng_dataset*> sets;
      for (const auto& p : data_paths) {
        owned.push_back(load_data(p));
        sets.push_back(owned.back().get());
      }
      tng_model* m = nullptr;
      check(tng_train_classifier(env.get(), sets.data(), sets.size(), g.config_text().c_str(), g.seed, &m));
      ModelPtr model(m);
      const fs::path path = g.out_dir() / "classifier.json";
      check(tng_model_save(model.get(), path.string().c_str()));
      std::cout << "wrote " << path.string() << "\n";
    };
  });

  // dagger
  std::string model_path;
  int iterations = 0;
  auto* dagger = app.add_subcommand("dagger", "Aggregate learner rollouts relabelled by the expert");
  dagger->add_option("--env", env_path, "Environment file")->required();
  dagger->add_option("--model", model_path, "Regression model to roll out")->required();
  dagger->add_option("--data", data_paths, "Dataset to aggregate into")->required()->expected(1);
  dagger->add_option("--trajectory", trajectory, "Trajectory id")->required();
  dagger->add_option("--iterations", iterations, "Iterations (default 3)")->check(CLI::PositiveNumber);
  dagger->callback([&] {
    action = [&] {
      if (iterations > 0) g.config["dagger"]["iterations"] = iterations;
      const int count = g.config.contains("dagger") && g.config["dagger"].contains("iterations")
                            ? g.config["dagger"]["iterations"].get<int>()
                            : 3;
      EnvPtr env = load_env(env_path);
      const std::size_t index = trajectory_index(env.get(), trajectory);
      DataPtr data = load_data(data_paths.front());
      ModelPtr model = load_model(model_path);
      const fs::path dir = g.out_dir();
      for (int k = 1; k <= count; ++k) {
        tng_dataset* d = nullptr;
        tng_model* m = nullptr;
        check(tng_dagger(env.get(), index, model.get(), data.get(), k, g.config_text().c_str(), g.seed, &d, &m));
        data.reset(d);
        model.reset(m);
        const std::string stem = "dagger_" + std::to_string(trajectory) + "_iter" + std::to_string(k);
        check(tng_dataset_save(data.get(), (dir / (stem + ".jsonl")).string().c_str()));
        check(tng_model_save(model.get(), (dir / (stem + ".json")).string().c_str()));
        std::cout << "iteration " << k << ": " << tng_dataset_size(data.get()) << " samples\n";
      }
    };
  });

  // graph build | inspect
  auto* graph = app.add_subcommand("graph", "Assemble or inspect navigation graphs");
  graph->require_subcommand(1);
  std::vector<std::string> model_paths;
  std::string classifier_path;
  bool train_all = false;
  std::string controller_kind;
  auto* graph_build = graph->add_subcommand("build", "Enroll intersections and write a graph file");
  graph_build->add_option("--env", env_path, "Environment file")->required();
  graph_build->add_option("--models", model_paths, "One controller model per trajectory, in order");
  graph_build->add_option("--classifier", classifier_path, "Trajectory classifier model");
  graph_build->add_flag("--train", train_all, "Train every component from scratch");
  graph_build->add_option("--controller", controller_kind, "regression or detection (with --train)");
  graph_build->callback([&] {
    action = [&] {
      EnvPtr env = load_env(env_path);
      if (!controller_kind.empty()) g.config["graph"]["controller"] = controller_kind;
      tng_graph* raw = nullptr;
      if (train_all) {
        check(tng_graph_train(env.get(), g.config_text().c_str(), g.seed, &raw));
      } else {
        if (model_paths.empty() || classifier_path.empty()) {
          throw CLI::ValidationError("graph build", "needs --models and --classifier, or --train");
        }
        std::vector<ModelPtr> owned;
        std::vector<const tng_model*> ctl;
        for (const auto& p : model_paths) {
          owned.push_back(load_model(p));
          ctl.push_back(owned.back().get());
        }
        ModelPtr clf = load_model(classifier_path);
        check(tng_graph_assemble(env.get(), ctl.data(), ctl.size(), clf.get(), g.config_text().c_str(),
                                 g.seed, &raw));
      }
      GraphPtr built(raw);
      const fs::path path = g.out_dir() / "graph.json";
      check(tng_graph_save(built.get(), path.string().c_str()));
      std::cout << "wrote " << path.string() << " (" << tng_graph_vertex_count(built.get())
                << " vertices, " << tng_graph_edge_count(built.get()) << " edges)\n";
    };
  });
  std::string graph_path;
  auto* graph_inspect = graph->add_subcommand("inspect", "Print a graph summary");
  graph_inspect->add_option("graph", graph_path, "Graph file")->required();
  graph_inspect->callback([&] {
    action = [&] {
      GraphPtr gr = load_graph(graph_path);
      char* text = nullptr;
      check(tng_graph_summary(gr.get(), &text));
      std::cout << take(text);
    };
  });

  // navigate
  int from = -1;
  int to = -1;
  auto* navigate = app.add_subcommand("navigate", "Run one supervised navigation episode");
  navigate->add_option("--graph", graph_path, "Graph file")->required();
  navigate->add_option("--env", env_path, "Environment file")->required();
  navigate->add_option("--from", from, "Source trajectory id")->required();
  navigate->add_option("--to", to, "Destination trajectory id")->required();
  navigate->callback([&] {
    action = [&] {
      EnvPtr env = load_env(env_path);
      GraphPtr gr = load_graph(graph_path);
      char* text = nullptr;
      check(tng_navigate(gr.get(), env.get(), trajectory_index(env.get(), from),
                         trajectory_index(env.get(), to), g.config_text().c_str(), g.seed, &text));
      const std::string episode = take(text);
      const fs::path path = g.out_dir() / ("episode_" + std::to_string(from) + "_" + std::to_string(to) + ".json");
      write_file(path, episode);
      const json doc = json::parse(episode);
      std::cout << "outcome " << doc["outcome"].get<std::string>() << ", PA "
                << doc["pa"].get<double>() << ", distance " << doc["distance"].get<double>() << " m\n"
                << "wrote " << path.string() << "\n";
    };
  });

  // eval laps | matrix | degradation
  auto* eval = app.add_subcommand("eval", "Evaluation protocols");
  eval->require_subcommand(1);
  auto write_report = [&](const std::string& stem, char* report, char* csv) {
    const fs::path dir = g.out_dir();
    const std::string text = take(report);
    write_file(dir / (stem + ".json"), text);
    write_file(dir / (stem + ".csv"), take(csv));
    char* rendered = nullptr;
    check(tng_report_render(text.c_str(), &rendered));
    std::cout << take(rendered) << "wrote " << (dir / (stem + ".json")).string() << " and "
              << (dir / (stem + ".csv")).string() << "\n";
  };
  auto* eval_laps = eval->add_subcommand("laps", "Supervised lap experiment");
  eval_laps->add_option("--env", env_path, "Environment file")->required();
  eval_laps->add_option("--model", model_path, "Controller model (default: the expert)");
  eval_laps->add_option("--trajectory", trajectory, "Trajectory id")->required();
  eval_laps->add_option("--laps", laps, "Target laps (default 10)")->check(CLI::PositiveNumber);
  eval_laps->callback([&] {
    action = [&] {
      if (laps > 0) g.config["laps"]["laps"] = laps;
      EnvPtr env = load_env(env_path);
      ModelPtr model = model_path.empty() ? ModelPtr() : load_model(model_path);
      char* report = nullptr;
      char* csv = nullptr;
      check(tng_eval_laps(env.get(), model.get(), trajectory_index(env.get(), trajectory),
                          g.config_text().c_str(), g.seed, &report, &csv));
      write_report("laps", report, csv);
    };
  });
  auto* eval_matrix = eval->add_subcommand("matrix", "All-pairs navigation matrix");
  eval_matrix->add_option("--graph", graph_path, "Graph file")->required();
  eval_matrix->add_option("--env", env_path, "Environment file")->required();
  eval_matrix->callback([&] {
    action = [&] {
      EnvPtr env = load_env(env_path);
      GraphPtr gr = load_graph(graph_path);
      char* report = nullptr;
      char* csv = nullptr;
      check(tng_eval_matrix(gr.get(), env.get(), g.config_text().c_str(), g.seed, g.jobs, &report, &csv));
      write_report("matrix", report, csv);
    };
  });
  std::vector<double> magnitudes;
  auto* eval_deg = eval->add_subcommand("degradation", "Landmark-perturbation sweep");
  eval_deg->add_option("--env", env_path, "Environment file")->required();
  eval_deg->add_option("--models", model_paths, "Controller models")->required();
  eval_deg->add_option("--trajectory", trajectory, "Trajectory id")->required();
  eval_deg->add_option("--magnitudes", magnitudes, "Perturbation magnitudes in metres");
  eval_deg->callback([&] {
    action = [&] {
      if (!magnitudes.empty()) g.config["degradation"]["magnitudes"] = magnitudes;
      EnvPtr env = load_env(env_path);
      std::vector<ModelPtr> owned;
      std::vector<const tng_model*> models;
      for (const auto& p : model_paths) {
        owned.push_back(load_model(p));
        models.push_back(owned.back().get());
      }
      char* report = nullptr;
      char* csv = nullptr;
      check(tng_eval_degradation(env.get(), models.data(), models.size(), trajectory_index(env.get(), trajectory),
                                 g.config_text().c_str(), g.seed, &report, &csv));
      write_report("degradation", report, csv);
    };
  });

  // report
  std::vector<std::string> report_paths;
  auto* report = app.add_subcommand("report", "Render report JSON files as text tables");
  report->add_option("reports", report_paths, "tng-report/1 files")->required();
  report->callback([&] {
    action = [&] {
      std::string all;
      for (const auto& p : report_paths) {
        char* text = nullptr;
        check(tng_report_render(read_file(p).c_str(), &text));
        all += take(text) + "\n";
      }
      std::cout << all;
      if (!g.out.empty() && g.out != ".") write_file(g.out_dir() / "report.txt", all);
    };
  });

  if (argc < 2) {
    std::cerr << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }
  try {
    g.load_config();
    if (action) action();
    return 0;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
