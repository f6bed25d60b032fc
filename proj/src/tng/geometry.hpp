#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tng {

inline constexpr double kPi = 3.14159265358979323846;

// Both components of every emitted motor command live in [-kCommandClip, kCommandClip].
inline constexpr double kCommandClip = 1.5;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 a);
double distance(Vec2 a, Vec2 b);

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, CCW-positive, kept in (-pi, pi]

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct MotorCommand {
  double linear = 0.0;   // m/s
  double angular = 0.0;  // rad/s, positive turns left

  friend bool operator==(const MotorCommand&, const MotorCommand&) = default;
};

// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

MotorCommand clip_command(MotorCommand cmd, double bound = kCommandClip);

bool is_finite(const Pose& pose);
bool is_finite(const MotorCommand& cmd);

// Exact unicycle integration: the robot moves along a circular arc (or a
// straight line when angular == 0) for dt seconds.
Pose step_unicycle(const Pose& pose, const MotorCommand& cmd, double dt);

struct Segment {
  Vec2 a;
  Vec2 b;
  double length = 0.0;
  double start_arc = 0.0;
  double heading = 0.0;
};

// Directed waypoint polyline. Closed trajectories wrap from the last waypoint
// back to the first.
class Trajectory {
 public:
  Trajectory(int id, std::string name, std::vector<Vec2> waypoints, bool closed);

  int id() const { return id_; }
  const std::string& name() const { return name_; }
  bool closed() const { return closed_; }
  std::span<const Vec2> waypoints() const { return waypoints_; }
  std::span<const Segment> segments() const { return segments_; }
  double length() const { return length_; }

  // Closed: arc wrapped into [0, length). Open: clamped to [0, length].
  double wrap_arc(double arc) const;
  // Signed shortest arc difference b - a (wrapped for closed trajectories).
  double arc_delta(double from_arc, double to_arc) const;

  Vec2 point_at(double arc) const;
  double heading_at(double arc) const;
  Pose pose_at(double arc) const;
  std::size_t segment_index_at(double arc) const;

 private:
  int id_;
  std::string name_;
  std::vector<Vec2> waypoints_;
  bool closed_;
  std::vector<Segment> segments_;
  double length_ = 0.0;
};

struct TrackError {
  double distance = 0.0;       // unsigned distance to the polyline
  double heading_error = 0.0;  // pose heading minus local tangent, (-pi, pi]
  double arc_position = 0.0;   // arc length of the nearest point
  double lateral = 0.0;        // signed offset, positive left of the path
  std::size_t segment = 0;
};

TrackError cross_track(const Pose& pose, const Trajectory& traj);

}  // namespace tng
