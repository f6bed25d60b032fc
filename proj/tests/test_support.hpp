#pragma once

#include <string>

#include "tng/environment.hpp"

namespace tng::test {

inline std::string data_path(const std::string& relative) {
  return std::string(TNG_DATA_DIR) + "/" + relative;
}

inline Environment load_bundled(const std::string& name) {
  return load_environment(data_path("envs/" + name + ".json"));
}

inline Environment with_noise(const Environment& env, double sigma) {
  EnvironmentSpec spec = env.spec();
  spec.featurizer.noise_sigma = sigma;
  return Environment(spec);
}

}  // namespace tng::test
