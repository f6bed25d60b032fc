#include "tng/featurizer.hpp"

#include <cmath>
#include <limits>

#include "tng/error.hpp"

namespace tng {

namespace {

constexpr double kProjectionGain = 3.0;

}  // namespace

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t featurizer_hash(const FeaturizerConfig& config, std::size_t landmark_count) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a(h, &config.seed, sizeof config.seed);
  const std::int64_t dims[] = {config.feature_dim, config.ray_count,
                               static_cast<std::int64_t>(landmark_count)};
  h = fnv1a(h, dims, sizeof dims);
  h = fnv1a(h, &config.max_range, sizeof config.max_range);
  return h;
}

Featurizer::Featurizer(const FeaturizerConfig& config, std::vector<Landmark> landmarks,
                       Bounds bounds)
    : config_(config), landmarks_(std::move(landmarks)), bounds_(bounds) {
  if (config_.feature_dim < 1) throw ValidationError("featurizer.feature_dim must be >= 1");
  if (config_.ray_count < 0) throw ValidationError("featurizer.ray_count must be >= 0");
  if (!(config_.max_range > 0.0) || !std::isfinite(config_.max_range)) {
    throw ValidationError("featurizer.max_range must be positive");
  }
  if (!(config_.noise_sigma >= 0.0) || !std::isfinite(config_.noise_sigma)) {
    throw ValidationError("featurizer.noise_sigma must be >= 0");
  }
  const int raw = config_.ray_count + 2 * static_cast<int>(landmarks_.size());
  if (raw < 1) throw ValidationError("featurizer needs at least one ray or landmark");

  std::mt19937_64 engine(config_.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const double scale = kProjectionGain / std::sqrt(static_cast<double>(raw));
  projection_.resize(config_.feature_dim, raw);
  for (int r = 0; r < config_.feature_dim; ++r) {
    for (int c = 0; c < raw; ++c) projection_(r, c) = scale * normal(engine);
  }
  bias_.resize(config_.feature_dim);
  for (int r = 0; r < config_.feature_dim; ++r) bias_(r) = uniform(engine);
}

Eigen::VectorXd Featurizer::raw(const Pose& pose) const {
  Eigen::VectorXd out(raw_dim());
  const double max_range = config_.max_range;
  const double inf = std::numeric_limits<double>::infinity();

  for (int k = 0; k < config_.ray_count; ++k) {
    const double angle = pose.theta + 2.0 * kPi * k / config_.ray_count;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double tx = c > 0.0 ? (bounds_.max_x - pose.x) / c
                      : c < 0.0 ? (bounds_.min_x - pose.x) / c
                                : inf;
    const double ty = s > 0.0 ? (bounds_.max_y - pose.y) / s
                      : s < 0.0 ? (bounds_.min_y - pose.y) / s
                                : inf;
    out(k) = std::clamp(std::min(tx, ty), 0.0, max_range) / max_range;
  }

  const double ct = std::cos(pose.theta);
  const double st = std::sin(pose.theta);
  int idx = config_.ray_count;
  for (const Landmark& lm : landmarks_) {
    const double dx = lm.x - pose.x;
    const double dy = lm.y - pose.y;
    const double range = std::hypot(dx, dy);
    const double fade = std::max(0.0, 1.0 - range / max_range);
    const double weight = lm.signature * fade * fade;
    double cos_b = 1.0;
    double sin_b = 0.0;
    if (range > 0.0) {
      cos_b = (ct * dx + st * dy) / range;
      sin_b = (-st * dx + ct * dy) / range;
    }
    out(idx++) = weight * cos_b;
    out(idx++) = weight * sin_b;
  }
  return out;
}

Eigen::VectorXd Featurizer::encode(const Pose& pose) const {
  Eigen::VectorXd z = projection_ * raw(pose) + bias_;
  return z.array().tanh().matrix();
}

Observation Featurizer::observe(const Pose& pose, NoiseStream& stream, double timestamp) const {
  Observation obs{encode(pose), timestamp};
  if (config_.noise_sigma > 0.0) {
    for (Eigen::Index i = 0; i < obs.features.size(); ++i) {
      obs.features(i) += config_.noise_sigma * stream.gaussian();
    }
  }
  return obs;
}

std::uint64_t Featurizer::hash() const { return featurizer_hash(config_, landmarks_.size()); }

}  // namespace tng
