#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tng/featurizer.hpp"
#include "tng/geometry.hpp"

namespace tng {

inline constexpr double kPolylineTolerance = 1e-6;
inline constexpr double kIntersectionDedupRadius = 0.05;
inline constexpr double kDefaultWorldMargin = 3.0;

// Trajectory ids in intersections are the user-facing ids; `from_index` and
// `to_index` are positions in Environment::trajectories() and double as TNG
// vertex ids.
struct Intersection {
  int from_trajectory = 0;
  int to_trajectory = 0;
  std::size_t from_index = 0;
  std::size_t to_index = 0;
  Vec2 point;
  double from_arc = 0.0;
  double to_arc = 0.0;
};

struct EnvironmentSpec {
  std::string name = "unnamed";
  std::vector<Trajectory> trajectories;
  std::vector<Landmark> landmarks;
  FeaturizerConfig featurizer;
  double world_margin = kDefaultWorldMargin;
  std::uint64_t noise_seed = 0;
  // Directed (from id, to id) pairs whose intersections are dropped.
  std::vector<std::pair<int, int>> suppress;
  // When set, construction fails unless the computed flag agrees.
  std::optional<bool> declared_navigable;
};

// Immutable once built; share freely across threads.
class Environment {
 public:
  explicit Environment(EnvironmentSpec spec);

  const std::string& name() const { return spec_.name; }
  const std::vector<Trajectory>& trajectories() const { return spec_.trajectories; }
  const std::vector<Intersection>& intersections() const { return intersections_; }
  const std::vector<Landmark>& landmarks() const { return spec_.landmarks; }
  const FeaturizerConfig& featurizer_config() const { return spec_.featurizer; }
  const Featurizer& featurizer() const { return *featurizer_; }
  const Bounds& bounds() const { return bounds_; }
  const EnvironmentSpec& spec() const { return spec_; }
  std::uint64_t noise_seed() const { return spec_.noise_seed; }
  bool navigable() const { return navigable_; }

  const Trajectory& trajectory(std::size_t index) const { return spec_.trajectories.at(index); }
  std::optional<std::size_t> index_of(int trajectory_id) const;

  Observation observe(const Pose& pose, NoiseStream& stream, double timestamp = 0.0) const {
    return featurizer_->observe(pose, stream, timestamp);
  }

  // Hash over geometry, landmarks, featurizer and noise seed.
  std::uint64_t hash() const;

 private:
  EnvironmentSpec spec_;
  std::vector<Intersection> intersections_;
  Bounds bounds_;
  std::shared_ptr<const Featurizer> featurizer_;
  bool navigable_ = false;
};

// Raw geometric crossings between two polylines, before deduplication.
struct Crossing {
  Vec2 point;
  double arc_a = 0.0;
  double arc_b = 0.0;
};
std::vector<Crossing> polyline_crossings(const Trajectory& a, const Trajectory& b);

std::vector<Intersection> enumerate_intersections(
    const std::vector<Trajectory>& trajectories,
    const std::vector<std::pair<int, int>>& suppress = {});

// True when every vertex reaches every other along directed edges.
bool strongly_connected(std::size_t vertex_count,
                        const std::vector<std::pair<std::size_t, std::size_t>>& edges);

Bounds world_bounds(const std::vector<Trajectory>& trajectories, double margin);

// JSON (format tag "tng-env/1").
Environment parse_environment(const std::string& text);
Environment load_environment(const std::string& path);
std::string environment_to_string(const Environment& env);
void save_environment(const Environment& env, const std::string& path);

// Bundled environments: two_crossing, parallel, loop, square, straight,
// four_loops and star5.
std::vector<std::string> environment_presets();
EnvironmentSpec preset_spec(const std::string& name, std::uint64_t seed = 1);
Environment make_preset(const std::string& name, std::uint64_t seed = 1);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tng
