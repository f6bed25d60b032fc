#include "tng/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tng/error.hpp"
#include "tng/json_util.hpp"

namespace tng {

Bounds world_bounds(const std::vector<Trajectory>& trajectories, double margin) {
  if (trajectories.empty()) return {};
  Bounds b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& t : trajectories) {
    for (const Vec2& w : t.waypoints()) {
      b.min_x = std::min(b.min_x, w.x);
      b.min_y = std::min(b.min_y, w.y);
      b.max_x = std::max(b.max_x, w.x);
      b.max_y = std::max(b.max_y, w.y);
    }
  }
  b.min_x -= margin;
  b.min_y -= margin;
  b.max_x += margin;
  b.max_y += margin;
  return b;
}

std::vector<Crossing> polyline_crossings(const Trajectory& a, const Trajectory& b) {
  std::vector<Crossing> out;
  for (const Segment& sa : a.segments()) {
    const Vec2 d1 = sa.b - sa.a;
    for (const Segment& sb : b.segments()) {
      const Vec2 d2 = sb.b - sb.a;
      const double den = cross(d1, d2);
      // Parallel and collinear segment pairs have no isolated crossing point.
      if (std::abs(den) <= 1e-12 * sa.length * sb.length) continue;
      const Vec2 w = sb.a - sa.a;
      const double t = cross(w, d2) / den;
      const double u = cross(w, d1) / den;
      const double tol_t = kPolylineTolerance / sa.length;
      const double tol_u = kPolylineTolerance / sb.length;
      if (t < -tol_t || t > 1.0 + tol_t || u < -tol_u || u > 1.0 + tol_u) continue;
      const double tc = std::clamp(t, 0.0, 1.0);
      const double uc = std::clamp(u, 0.0, 1.0);
      const Vec2 p = sa.a + tc * d1;
      bool duplicate = false;
      for (const Crossing& c : out) {
        if (distance(c.point, p) <= kIntersectionDedupRadius) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
      out.push_back({p, a.wrap_arc(sa.start_arc + tc * sa.length),
                     b.wrap_arc(sb.start_arc + uc * sb.length)});
    }
  }
  return out;
}

std::vector<Intersection> enumerate_intersections(const std::vector<Trajectory>& trajectories,
                                                  const std::vector<std::pair<int, int>>& suppress) {
  const std::set<std::pair<int, int>> blocked(suppress.begin(), suppress.end());
  std::vector<Intersection> out;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    for (std::size_t j = i + 1; j < trajectories.size(); ++j) {
      const Trajectory& ti = trajectories[i];
      const Trajectory& tj = trajectories[j];
      for (const Crossing& c : polyline_crossings(ti, tj)) {
        if (!blocked.count({ti.id(), tj.id()})) {
          out.push_back({ti.id(), tj.id(), i, j, c.point, c.arc_a, c.arc_b});
        }
        if (!blocked.count({tj.id(), ti.id()})) {
          out.push_back({tj.id(), ti.id(), j, i, c.point, c.arc_b, c.arc_a});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Intersection& a, const Intersection& b) {
    if (a.from_index != b.from_index) return a.from_index < b.from_index;
    if (a.to_index != b.to_index) return a.to_index < b.to_index;
    return a.from_arc < b.from_arc;
  });
  return out;
}

bool strongly_connected(std::size_t vertex_count,
                        const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  if (vertex_count <= 1) return true;
  auto reaches_all = [&](bool reverse) {
    std::vector<std::vector<std::size_t>> adj(vertex_count);
    for (auto [a, b] : edges) {
      if (a >= vertex_count || b >= vertex_count) continue;
      if (reverse) std::swap(a, b);
      adj[a].push_back(b);
    }
    std::vector<char> seen(vertex_count, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == vertex_count;
  };
  return reaches_all(false) && reaches_all(true);
}

Environment::Environment(EnvironmentSpec spec) : spec_(std::move(spec)) {
  if (spec_.trajectories.empty()) throw ValidationError("environment has no trajectories");
  std::set<int> ids;
  for (const auto& t : spec_.trajectories) {
    if (!ids.insert(t.id()).second) {
      throw ValidationError("duplicate trajectory id " + std::to_string(t.id()));
    }
  }
  for (const auto& [from, to] : spec_.suppress) {
    if (!ids.count(from) || !ids.count(to)) {
      throw ValidationError("suppress entry references unknown trajectory id");
    }
  }
  for (const auto& lm : spec_.landmarks) {
    if (!std::isfinite(lm.x) || !std::isfinite(lm.y) || !std::isfinite(lm.signature)) {
      throw ValidationError("non-finite landmark");
    }
  }
  if (!(spec_.world_margin >= 0.0) || !std::isfinite(spec_.world_margin)) {
    throw ValidationError("world_margin must be >= 0");
  }

  intersections_ = enumerate_intersections(spec_.trajectories, spec_.suppress);
  bounds_ = world_bounds(spec_.trajectories, spec_.world_margin);
  featurizer_ = std::make_shared<const Featurizer>(spec_.featurizer, spec_.landmarks, bounds_);

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& x : intersections_) edges.emplace_back(x.from_index, x.to_index);
  navigable_ = strongly_connected(spec_.trajectories.size(), edges);
  if (spec_.declared_navigable && *spec_.declared_navigable && !navigable_) {
    throw ValidationError("environment '" + spec_.name +
                          "' is declared navigable but its crossing graph is not strongly "
                          "connected");
  }
}

std::optional<std::size_t> Environment::index_of(int trajectory_id) const {
  for (std::size_t i = 0; i < spec_.trajectories.size(); ++i) {
    if (spec_.trajectories[i].id() == trajectory_id) return i;
  }
  return std::nullopt;
}

std::uint64_t Environment::hash() const {
  std::uint64_t h = kFnvOffset;
  auto mix = [&h](const auto& v) { h = fnv1a(h, &v, sizeof v); };
  for (const auto& t : spec_.trajectories) {
    mix(t.id());
    mix(t.closed());
    for (const Vec2& w : t.waypoints()) {
      mix(w.x);
      mix(w.y);
    }
  }
  for (const auto& lm : spec_.landmarks) {
    mix(lm.x);
    mix(lm.y);
    mix(lm.signature);
  }
  mix(featurizer_->hash());
  mix(spec_.featurizer.noise_sigma);
  mix(spec_.noise_seed);
  mix(spec_.world_margin);
  for (const auto& s : spec_.suppress) {
    mix(s.first);
    mix(s.second);
  }
  return h;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::string idx(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

Trajectory trajectory_from_json(const json& t, const std::string& path) {
  const int id = static_cast<int>(get_integer(require(t, "id", path), path + ".id"));
  std::string name = "trajectory-" + std::to_string(id);
  if (t.contains("name")) name = get_string(t["name"], path + ".name");
  const bool closed = get_bool(require(t, "closed", path), path + ".closed");
  const json& wps = require(t, "waypoints", path);
  if (!wps.is_array()) throw ParseError("field '" + path + ".waypoints': expected array");
  std::vector<Vec2> points;
  for (std::size_t k = 0; k < wps.size(); ++k) {
    const std::string wp = idx(path + ".waypoints", k);
    if (!wps[k].is_array() || wps[k].size() != 2) {
      throw ParseError("field '" + wp + "': expected [x, y]");
    }
    points.push_back({get_number(wps[k][0], wp + "[0]"), get_number(wps[k][1], wp + "[1]")});
  }
  try {
    return Trajectory(id, std::move(name), std::move(points), closed);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

EnvironmentSpec spec_from_json(const json& doc) {
  check_format(doc, "tng-env/1", "environment");
  EnvironmentSpec spec;
  if (doc.contains("name")) spec.name = get_string(doc["name"], "name");

  const json& trajs = require(doc, "trajectories", "");
  if (!trajs.is_array()) throw ParseError("field 'trajectories': expected array");
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    spec.trajectories.push_back(trajectory_from_json(trajs[i], idx("trajectories", i)));
  }

  if (doc.contains("landmarks")) {
    const json& lms = doc["landmarks"];
    if (!lms.is_array()) throw ParseError("field 'landmarks': expected array");
    for (std::size_t i = 0; i < lms.size(); ++i) {
      const std::string p = idx("landmarks", i);
      if (!lms[i].is_array() || lms[i].size() != 3) {
        throw ParseError("field '" + p + "': expected [x, y, signature]");
      }
      spec.landmarks.push_back({get_number(lms[i][0], p + "[0]"), get_number(lms[i][1], p + "[1]"),
                                get_number(lms[i][2], p + "[2]")});
    }
  }

  const json& f = require(doc, "featurizer", "");
  spec.featurizer.seed = get_unsigned(require(f, "seed", "featurizer"), "featurizer.seed");
  spec.featurizer.feature_dim = static_cast<int>(
      get_integer(require(f, "feature_dim", "featurizer"), "featurizer.feature_dim"));
  spec.featurizer.ray_count = static_cast<int>(
      get_integer(require(f, "ray_count", "featurizer"), "featurizer.ray_count"));
  spec.featurizer.max_range =
      get_number(require(f, "max_range", "featurizer"), "featurizer.max_range");
  spec.featurizer.noise_sigma =
      get_number(require(f, "noise_sigma", "featurizer"), "featurizer.noise_sigma");

  if (doc.contains("world_margin")) spec.world_margin = get_number(doc["world_margin"], "world_margin");
  if (doc.contains("noise_seed")) spec.noise_seed = get_unsigned(doc["noise_seed"], "noise_seed");
  if (doc.contains("navigable")) spec.declared_navigable = get_bool(doc["navigable"], "navigable");
  if (doc.contains("suppress")) {
    const json& s = doc["suppress"];
    if (!s.is_array()) throw ParseError("field 'suppress': expected array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string p = idx("suppress", i);
      if (!s[i].is_array() || s[i].size() != 2) throw ParseError("field '" + p + "': expected [from, to]");
      spec.suppress.emplace_back(static_cast<int>(get_integer(s[i][0], p + "[0]")),
                                 static_cast<int>(get_integer(s[i][1], p + "[1]")));
    }
  }
  return spec;
}

}  // namespace

json environment_to_json(const Environment& env) {
  const EnvironmentSpec& spec = env.spec();
  json doc;
  doc["format"] = "tng-env/1";
  doc["name"] = spec.name;
  json trajs = json::array();
  for (const auto& t : spec.trajectories) {
    json wps = json::array();
    for (const Vec2& w : t.waypoints()) wps.push_back({w.x, w.y});
    trajs.push_back({{"id", t.id()}, {"name", t.name()}, {"closed", t.closed()}, {"waypoints", wps}});
  }
  doc["trajectories"] = trajs;
  json lms = json::array();
  for (const auto& lm : spec.landmarks) lms.push_back({lm.x, lm.y, lm.signature});
  doc["landmarks"] = lms;
  doc["featurizer"] = {{"seed", spec.featurizer.seed},
                       {"feature_dim", spec.featurizer.feature_dim},
                       {"ray_count", spec.featurizer.ray_count},
                       {"max_range", spec.featurizer.max_range},
                       {"noise_sigma", spec.featurizer.noise_sigma}};
  doc["world_margin"] = spec.world_margin;
  doc["noise_seed"] = spec.noise_seed;
  if (!spec.suppress.empty()) {
    json s = json::array();
    for (const auto& [a, b] : spec.suppress) s.push_back({a, b});
    doc["suppress"] = s;
  }
  if (spec.declared_navigable) doc["navigable"] = *spec.declared_navigable;
  return doc;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

Environment parse_environment(const std::string& text) {
  return Environment(spec_from_json(parse_json_text(text, "environment")));
}

Environment load_environment(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_environment(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string environment_to_string(const Environment& env) {
  return environment_to_json(env).dump(2) + "\n";
}

void save_environment(const Environment& env, const std::string& path) {
  write_text_file(path, environment_to_string(env));
}

// ---------------------------------------------------------------------------
// Presets

namespace {

std::vector<Vec2> circle(double cx, double cy, double r, int n, bool clockwise) {
  std::vector<Vec2> pts;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * k / n;
    pts.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  if (clockwise) std::reverse(pts.begin() + 1, pts.end());
  return pts;
}

std::vector<Vec2> rounded_rect(double x0, double y0, double x1, double y1, double r) {
  std::vector<Vec2> pts;
  const struct {
    double cx, cy, start_deg;
  } corners[] = {{x1 - r, y0 + r, -90.0}, {x1 - r, y1 - r, 0.0}, {x0 + r, y1 - r, 90.0},
                 {x0 + r, y0 + r, 180.0}};
  for (const auto& c : corners) {
    for (int k = 0; k <= 90; k += 15) {
      const double a = (c.start_deg + k) * kPi / 180.0;
      pts.push_back({c.cx + r * std::cos(a), c.cy + r * std::sin(a)});
    }
  }
  return pts;
}

void scatter_landmarks(EnvironmentSpec& spec, int count, double inset, std::uint64_t seed) {
  const Bounds b = world_bounds(spec.trajectories, spec.world_margin);
  NoiseStream rng(mix_seed(seed, 0x1a4d));
  for (int i = 0; i < count; ++i) {
    const double x = rng.uniform(b.min_x + inset, b.max_x - inset);
    const double y = rng.uniform(b.min_y + inset, b.max_y - inset);
    const double s = rng.uniform(0.5, 1.5);
    spec.landmarks.push_back({x, y, s});
  }
}

}  // namespace

std::vector<std::string> environment_presets() {
  return {"two_crossing", "parallel", "loop", "square", "straight", "four_loops", "star5"};
}

EnvironmentSpec preset_spec(const std::string& name, std::uint64_t seed) {
  EnvironmentSpec spec;
  spec.name = name;
  spec.featurizer.seed = seed;
  if (name == "two_crossing") {
    spec.trajectories.emplace_back(0, "horizontal", std::vector<Vec2>{{-5, 0}, {0.3, 0}, {5, 0}},
                                   false);
    spec.trajectories.emplace_back(1, "vertical", std::vector<Vec2>{{0, -5}, {0, 0.3}, {0, 5}},
                                   false);
    spec.featurizer.max_range = 6.0;
    scatter_landmarks(spec, 12, 1.0, seed);
  } else if (name == "parallel") {
    spec.trajectories.emplace_back(0, "lower", std::vector<Vec2>{{-5, 0}, {0, 0}, {5, 0}}, false);
    spec.trajectories.emplace_back(1, "upper", std::vector<Vec2>{{-5, 2}, {0, 2}, {5, 2}}, false);
    spec.featurizer.max_range = 6.0;
    scatter_landmarks(spec, 12, 1.0, seed);
  } else if (name == "loop") {
    spec.trajectories.emplace_back(0, "loop", rounded_rect(0, 0, 12, 6, 1.5), true);
    spec.featurizer.max_range = 6.0;
    scatter_landmarks(spec, 12, 1.0, seed);
  } else if (name == "square") {
    spec.trajectories.emplace_back(
        0, "square", std::vector<Vec2>{{4, 0}, {8, 0}, {8, 8}, {0, 8}, {0, 0}}, true);
    spec.featurizer.max_range = 6.0;
    scatter_landmarks(spec, 16, 1.0, seed);
  } else if (name == "four_loops") {
    // Four overlapping loops on a 2x2 grid; each loop crosses all the others.
    spec.trajectories.emplace_back(0, "south-west", rounded_rect(0, 0, 8, 6, 1.5), true);
    spec.trajectories.emplace_back(1, "south-east", rounded_rect(5, 1, 13, 7, 1.5), true);
    spec.trajectories.emplace_back(2, "north-west", rounded_rect(1, 4, 9, 10, 1.5), true);
    spec.trajectories.emplace_back(3, "north-east", rounded_rect(6, 5, 14, 11, 1.5), true);
    spec.featurizer.max_range = 8.0;
    scatter_landmarks(spec, 40, 1.0, seed);
  } else if (name == "straight") {
    spec.trajectories.emplace_back(0, "straight", std::vector<Vec2>{{0, 0}, {20, 0}, {40, 0}},
                                   false);
    spec.featurizer.max_range = 6.0;
    scatter_landmarks(spec, 40, 1.0, seed);
  } else if (name == "star5") {
    // A clockwise hub circle crossed by four counter-clockwise petals.
    const double r = 3.0;
    const double d = 1.9 * r;
    spec.trajectories.emplace_back(0, "hub", circle(0, 0, r, 36, true), true);
    spec.trajectories.emplace_back(1, "east", circle(d, 0, r, 36, false), true);
    spec.trajectories.emplace_back(2, "north", circle(0, d, r, 36, false), true);
    spec.trajectories.emplace_back(3, "west", circle(-d, 0, r, 36, false), true);
    spec.trajectories.emplace_back(4, "south", circle(0, -d, r, 36, false), true);
    spec.featurizer.max_range = 8.0;
    spec.declared_navigable = true;
    scatter_landmarks(spec, 60, 1.0, seed);
  } else {
    throw InvalidInputError("unknown environment preset '" + name + "'");
  }
  return spec;
}

Environment make_preset(const std::string& name, std::uint64_t seed) {
  return Environment(preset_spec(name, seed));
}

}  // namespace tng
