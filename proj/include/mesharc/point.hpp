#pragma once

#include <cmath>

namespace mesharc {

/// A point (or vector) in the plane.
struct Point {
  double x = 0.0;
  double y = 0.0;

  constexpr Point& operator+=(const Point& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Point& operator-=(const Point& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend constexpr Point operator+(Point a, const Point& b) { return a += b; }
  friend constexpr Point operator-(Point a, const Point& b) { return a -= b; }
  friend constexpr Point operator*(double s, const Point& p) {
    return {s * p.x, s * p.y};
  }
  friend constexpr bool operator==(const Point&, const Point&) = default;
};

inline constexpr double dot(const Point& a, const Point& b) {
  return a.x * b.x + a.y * b.y;
}

inline double norm(const Point& p) { return std::hypot(p.x, p.y); }

inline double distance(const Point& a, const Point& b) { return norm(a - b); }

}  // namespace mesharc
