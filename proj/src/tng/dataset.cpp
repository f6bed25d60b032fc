#include "tng/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tng/environment.hpp"
#include "tng/error.hpp"
#include "tng/json_util.hpp"

namespace tng {

std::string dagger_source(int iteration) {
  return "dagger-iteration-" + std::to_string(iteration);
}

bool is_valid_source(const std::string& source) {
  if (source == kSourceExpertLap || source == kSourceAugmentation) return true;
  const std::string prefix = "dagger-iteration-";
  if (source.rfind(prefix, 0) != 0 || source.size() == prefix.size()) return false;
  for (std::size_t i = prefix.size(); i < source.size(); ++i) {
    if (source[i] < '0' || source[i] > '9') return false;
  }
  return true;
}

void Dataset::add(DemoSample sample) {
  if (feature_dim_ == 0) feature_dim_ = static_cast<int>(sample.observation.features.size());
  if (sample.observation.features.size() != feature_dim_) {
    throw DimensionMismatchError("dataset sample", feature_dim_,
                                 sample.observation.features.size());
  }
  if (!sample.observation.features.allFinite()) throw InvalidInputError("non-finite features");
  if (!is_finite(sample.command) || std::abs(sample.command.linear) > kCommandClip ||
      std::abs(sample.command.angular) > kCommandClip) {
    throw InvalidInputError("sample command outside the clip bound");
  }
  if (!is_valid_source(sample.source)) {
    throw InvalidInputError("unknown sample source '" + sample.source + "'");
  }
  samples_.push_back(std::move(sample));
}

void Dataset::append(const Dataset& other) {
  samples_.reserve(samples_.size() + other.size());
  for (const auto& s : other.samples()) add(s);
}

std::vector<ProvenanceEntry> Dataset::provenance() const {
  std::vector<ProvenanceEntry> out;
  for (const auto& s : samples_) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const ProvenanceEntry& e) { return e.source == s.source; });
    if (it == out.end()) {
      out.push_back({s.source, 1});
    } else {
      ++it->count;
    }
  }
  return out;
}

Eigen::MatrixXd Dataset::features() const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples_.size()), feature_dim_);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = samples_[i].observation.features.transpose();
  }
  return x;
}

Eigen::MatrixXd Dataset::commands() const {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(samples_.size()), 2);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    y(static_cast<Eigen::Index>(i), 0) = samples_[i].command.linear;
    y(static_cast<Eigen::Index>(i), 1) = samples_[i].command.angular;
  }
  return y;
}

std::string dataset_to_string(const Dataset& data) {
  std::ostringstream out;
  out << json{{"format", "tng-dataset/1"}, {"feature_dim", data.feature_dim()}}.dump() << '\n';
  for (const auto& s : data.samples()) {
    json rec;
    rec["features"] = vector_to_json(s.observation.features);
    rec["command"] = {s.command.linear, s.command.angular};
    rec["pose"] = pose_to_json(s.pose);
    rec["trajectory_id"] = s.trajectory_id;
    rec["source"] = s.source;
    rec["timestamp"] = s.observation.timestamp;
    out << rec.dump() << '\n';
  }
  return out.str();
}

Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("dataset: missing header line");
  const std::string where0 = "dataset line " + std::to_string(line_no);
  const json header = parse_json_text(line, where0);
  check_format(header, "tng-dataset/1", where0);
  const auto dim = get_integer(require(header, "feature_dim", ""), "feature_dim");
  if (dim < 1) throw ParseError(where0 + ": feature_dim must be >= 1");
  Dataset data(static_cast<int>(dim));
  while (next_line()) {
    const std::string where = "dataset line " + std::to_string(line_no);
    try {
      const json rec = parse_json_text(line, where);
      DemoSample s;
      s.observation.features = get_vector(require(rec, "features", ""), "features");
      const json& cmd = require(rec, "command", "");
      if (!cmd.is_array() || cmd.size() != 2) throw ParseError("field 'command': expected [v, w]");
      s.command = {get_number(cmd[0], "command[0]"), get_number(cmd[1], "command[1]")};
      s.pose = pose_from_json(require(rec, "pose", ""), "pose");
      s.trajectory_id =
          static_cast<int>(get_integer(require(rec, "trajectory_id", ""), "trajectory_id"));
      s.source = get_string(require(rec, "source", ""), "source");
      if (rec.contains("timestamp")) s.observation.timestamp = get_number(rec["timestamp"], "timestamp");
      data.add(std::move(s));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Parse) throw ParseError(where + ": " + e.what());
      throw ValidationError(where + ": " + e.what());
    }
  }
  return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
  write_text_file(path, dataset_to_string(data));
}

Dataset load_dataset(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_dataset(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace tng
