#pragma once

#include <algorithm>
#include <cmath>

namespace morseb {

struct Vec2 {
  double x = 0;
  double y = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// Distance from p to the segment [a, b], together with the arc-length
/// parameter of the nearest point measured from a.
struct SegProj {
  double param = 0;
  double dist = 0;
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline SegProj project_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len = norm(ab);
  if (len == 0) return {0, dist(p, a)};
  const double t = dot(p - a, ab) / len;
  if (t <= 0) return {0, dist(p, a)};
  if (t >= len) return {len, dist(p, b)};
  // Interior foot: the perpendicular distance, exact when p is on the line.
  return {t, std::abs(cross(p - a, ab)) / len};
}

}  // namespace morseb
