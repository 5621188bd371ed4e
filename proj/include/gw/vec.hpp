#pragma once

#include <array>
#include <cmath>

namespace gw {

/// 2-D point / vector with the handful of operations the solvers need.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double& operator[](int i) { return i == 0 ? x : y; }
  double operator[](int i) const { return i == 0 ? x : y; }

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& v) { return std::sqrt(dot(v, v)); }

/// Symmetric 2x2 matrix (dispersion tensors).
struct Mat2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  Vec2 apply(const Vec2& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }

  static Mat2 identity(double s = 1.0) { return {s, 0.0, s}; }
};

/// n' M n for a unit vector n.
inline double normal_component(const Mat2& m, const Vec2& n) {
  return dot(n, m.apply(n));
}

}  // namespace gw
