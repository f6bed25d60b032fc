#pragma once

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

#include "tng/featurizer.hpp"
#include "tng/geometry.hpp"

namespace tng {

inline constexpr const char* kSourceExpertLap = "expert-lap";
inline constexpr const char* kSourceAugmentation = "augmentation";
std::string dagger_source(int iteration);  // "dagger-iteration-<k>"
bool is_valid_source(const std::string& source);

struct DemoSample {
  Observation observation;
  MotorCommand command;
  Pose pose;  // kept for augmentation and relabelling only
  int trajectory_id = 0;
  std::string source = kSourceExpertLap;
};

struct ProvenanceEntry {
  std::string source;
  std::size_t count = 0;
};

class Dataset {
 public:
  explicit Dataset(int feature_dim = 0) : feature_dim_(feature_dim) {}

  int feature_dim() const { return feature_dim_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const std::vector<DemoSample>& samples() const { return samples_; }
  const DemoSample& operator[](std::size_t i) const { return samples_[i]; }

  // Validates dimension, finiteness, the clip bound and the source tag.
  void add(DemoSample sample);
  void append(const Dataset& other);

  // (source, count) in order of first appearance; counts sum to size().
  std::vector<ProvenanceEntry> provenance() const;

  Eigen::MatrixXd features() const;  // n x d
  Eigen::MatrixXd commands() const;  // n x 2

 private:
  int feature_dim_;
  std::vector<DemoSample> samples_;
};

// JSON lines, header {"format":"tng-dataset/1","feature_dim":d}.
std::string dataset_to_string(const Dataset& data);
Dataset parse_dataset(const std::string& text);
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace tng
