#pragma once

#include <cmath>

namespace selfish {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

inline double deg_to_rad(double deg) { return deg * (M_PI / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / M_PI); }

// Unit heading for an orientation in degrees, east = 0, counter-clockwise.
inline Vec2 heading_vec(double deg) {
  const double r = deg_to_rad(deg);
  return {std::cos(r), std::sin(r)};
}

// Orientation into [0, 360).
inline double wrap_angle_360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;  // fmod rounding can land exactly on 360
  return r;
}

// Relative angle into (-180, 180]. Exactly-behind maps to +180.
inline double wrap_angle_signed(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

// Coordinate-wise wrap into [0, L).
inline Vec2 wrap_position(Vec2 p, double L) {
  p.x = std::fmod(p.x, L);
  if (p.x < 0.0) p.x += L;
  if (p.x >= L) p.x = 0.0;
  p.y = std::fmod(p.y, L);
  if (p.y < 0.0) p.y += L;
  if (p.y >= L) p.y = 0.0;
  return p;
}

// Shortest displacement from `from` to `to` on the torus; each component in
// [-L/2, L/2], with the +L/2 image preferred on exact ties.
inline Vec2 torus_delta(const Vec2& from, const Vec2& to, double L) {
  const double half = 0.5 * L;
  double dx = to.x - from.x;
  double dy = to.y - from.y;
  if (dx > half) dx -= L;
  if (dx < -half) dx += L;
  if (dy > half) dy -= L;
  if (dy < -half) dy += L;
  return {dx, dy};
}

inline double torus_distance(const Vec2& a, const Vec2& b, double L) {
  double dx = std::fabs(a.x - b.x);
  double dy = std::fabs(a.y - b.y);
  if (dx > L - dx) dx = L - dx;
  if (dy > L - dy) dy = L - dy;
  return std::hypot(dx, dy);
}

// Largest possible torus separation.
inline double max_torus_distance(double L) { return L * std::sqrt(2.0) / 2.0; }

// Signed turn in (-180, 180] that would point `facing_deg` at `to` along the
// shortest torus displacement. Coincident positions map to 0 by convention.
inline double torus_direction_deg(const Vec2& from, double facing_deg,
                                  const Vec2& to, double L) {
  const Vec2 d = torus_delta(from, to, L);
  if (d.x == 0.0 && d.y == 0.0) return 0.0;
  const double bearing = rad_to_deg(std::atan2(d.y, d.x));
  return wrap_angle_signed(bearing - facing_deg);
}

}  // namespace selfish
