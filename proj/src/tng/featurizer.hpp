#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tng/geometry.hpp"

namespace tng {

struct Landmark {
  double x = 0.0;
  double y = 0.0;
  double signature = 1.0;

  friend bool operator==(const Landmark&, const Landmark&) = default;
};

struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(Vec2 p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct FeaturizerConfig {
  std::uint64_t seed = 1;  // fixes the encoder weights
  int feature_dim = 128;
  int ray_count = 16;
  double max_range = 8.0;
  double noise_sigma = 0.0;

  friend bool operator==(const FeaturizerConfig&, const FeaturizerConfig&) = default;
};

// Seeded source of observation noise and sampling randomness. Copying a stream
// snapshots its full state, so replaying a copy reproduces the same draws.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed = 0) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

struct Observation {
  Eigen::VectorXd features;
  double timestamp = 0.0;
};

// Fixed synthetic encoder. Raw measurements (range rays against the world
// walls plus signature-weighted landmark bearings) pass through a frozen,
// seed-determined random tanh layer of width feature_dim.
class Featurizer {
 public:
  Featurizer(const FeaturizerConfig& config, std::vector<Landmark> landmarks, Bounds bounds);

  const FeaturizerConfig& config() const { return config_; }
  int feature_dim() const { return config_.feature_dim; }
  int raw_dim() const { return static_cast<int>(projection_.cols()); }
  std::span<const Landmark> landmarks() const { return landmarks_; }
  const Bounds& bounds() const { return bounds_; }

  Eigen::VectorXd raw(const Pose& pose) const;
  Eigen::VectorXd encode(const Pose& pose) const;
  // Noise is drawn from `stream` only when noise_sigma > 0.
  Observation observe(const Pose& pose, NoiseStream& stream, double timestamp = 0.0) const;

  // Identifies the encoder (not the landmark placement or noise level):
  // controllers trained against one hash can run in any world sharing it.
  std::uint64_t hash() const;

 private:
  FeaturizerConfig config_;
  std::vector<Landmark> landmarks_;
  Bounds bounds_;
  Eigen::MatrixXd projection_;
  Eigen::VectorXd bias_;
};

std::uint64_t featurizer_hash(const FeaturizerConfig& config, std::size_t landmark_count);

// FNV-1a helpers shared by the hashing code.
std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t size);
inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;

// splitmix64 finalizer; derives independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace tng
