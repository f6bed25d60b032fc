#include "tng/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tng/error.hpp"

namespace tng {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }
double distance(Vec2 a, Vec2 b) { return norm(a - b); }

double normalize_angle(double angle) {
  double a = std::fmod(angle + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

MotorCommand clip_command(MotorCommand cmd, double bound) {
  return {std::clamp(cmd.linear, -bound, bound), std::clamp(cmd.angular, -bound, bound)};
}

bool is_finite(const Pose& pose) {
  return std::isfinite(pose.x) && std::isfinite(pose.y) && std::isfinite(pose.theta);
}

bool is_finite(const MotorCommand& cmd) {
  return std::isfinite(cmd.linear) && std::isfinite(cmd.angular);
}

namespace {

// sin(x)/x, well behaved at 0.
double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

Pose step_unicycle(const Pose& pose, const MotorCommand& cmd, double dt) {
  if (!is_finite(pose) || !is_finite(cmd) || !std::isfinite(dt)) {
    throw InvalidInputError("step_unicycle: non-finite input");
  }
  if (dt <= 0.0) throw InvalidInputError("step_unicycle: dt must be positive");

  // Chord of the arc: length v*dt*sinc(w*dt/2), direction theta + w*dt/2.
  // Reduces to the straight-line advance for w == 0.
  const double half_turn = 0.5 * cmd.angular * dt;
  const double chord = cmd.linear * dt * sinc(half_turn);
  const double dir = pose.theta + half_turn;
  return {pose.x + chord * std::cos(dir), pose.y + chord * std::sin(dir),
          normalize_angle(pose.theta + cmd.angular * dt)};
}

Trajectory::Trajectory(int id, std::string name, std::vector<Vec2> waypoints, bool closed)
    : id_(id), name_(std::move(name)), waypoints_(std::move(waypoints)), closed_(closed) {
  const std::string where = "trajectory " + std::to_string(id_);
  if (waypoints_.size() < 3) throw ValidationError(where + ": needs at least 3 waypoints");
  for (const auto& w : waypoints_) {
    if (!std::isfinite(w.x) || !std::isfinite(w.y)) {
      throw ValidationError(where + ": non-finite waypoint");
    }
  }
  const std::size_t n = waypoints_.size();
  const std::size_t count = closed_ ? n : n - 1;
  segments_.reserve(count);
  double arc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const Vec2 a = waypoints_[i];
    const Vec2 b = waypoints_[(i + 1) % n];
    const double len = distance(a, b);
    if (len <= 0.0) {
      throw ValidationError(where + ": consecutive waypoints " + std::to_string(i) + " and " +
                            std::to_string((i + 1) % n) + " coincide");
    }
    segments_.push_back({a, b, len, arc, std::atan2(b.y - a.y, b.x - a.x)});
    arc += len;
  }
  length_ = arc;
}

double Trajectory::wrap_arc(double arc) const {
  if (closed_) {
    double a = std::fmod(arc, length_);
    if (a < 0.0) a += length_;
    if (a >= length_) a = 0.0;
    return a;
  }
  return std::clamp(arc, 0.0, length_);
}

double Trajectory::arc_delta(double from_arc, double to_arc) const {
  double d = to_arc - from_arc;
  if (closed_) {
    d = std::fmod(d, length_);
    if (d > 0.5 * length_) d -= length_;
    if (d <= -0.5 * length_) d += length_;
  }
  return d;
}

std::size_t Trajectory::segment_index_at(double arc) const {
  const double a = wrap_arc(arc);
  auto it = std::upper_bound(segments_.begin(), segments_.end(), a,
                             [](double v, const Segment& s) { return v < s.start_arc; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(segments_.begin(), it) - 1);
}

Vec2 Trajectory::point_at(double arc) const {
  const double a = wrap_arc(arc);
  const Segment& s = segments_[segment_index_at(a)];
  const double t = std::clamp((a - s.start_arc) / s.length, 0.0, 1.0);
  return s.a + t * (s.b - s.a);
}

double Trajectory::heading_at(double arc) const {
  return segments_[segment_index_at(arc)].heading;
}

Pose Trajectory::pose_at(double arc) const {
  const Vec2 p = point_at(arc);
  return {p.x, p.y, heading_at(arc)};
}

TrackError cross_track(const Pose& pose, const Trajectory& traj) {
  const Vec2 p = pose.position();
  TrackError best;
  best.distance = std::numeric_limits<double>::infinity();
  double best_abs_heading = std::numeric_limits<double>::infinity();

  const auto segments = traj.segments();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    const Vec2 d = s.b - s.a;
    const double t = std::clamp(dot(p - s.a, d) / (s.length * s.length), 0.0, 1.0);
    const Vec2 foot = s.a + t * d;
    const double dist = distance(p, foot);
    const double heading_error = normalize_angle(pose.theta - s.heading);
    // At a shared waypoint two segments are equally near; prefer the one whose
    // tangent agrees with the pose heading.
    const bool closer = dist < best.distance - 1e-12;
    const bool tie = std::abs(dist - best.distance) <= 1e-12;
    if (closer || (tie && std::abs(heading_error) < best_abs_heading)) {
      best.distance = dist;
      best.heading_error = heading_error;
      best.arc_position = traj.wrap_arc(s.start_arc + t * s.length);
      best.lateral = cross(d, p - s.a) / s.length;
      best.segment = i;
      best_abs_heading = std::abs(heading_error);
    }
  }
  return best;
}

}  // namespace tng
