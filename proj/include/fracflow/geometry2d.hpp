#pragma once

#include <algorithm>
#include <cmath>

namespace fracflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return s * a; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// Counterclockwise rotation by 90 degrees.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  return {a.x / n, a.y / n};
}

/// Signed area of the triangle (a, b, c); positive for counterclockwise order.
inline double signed_area(Vec2 a, Vec2 b, Vec2 c) {
  return 0.5 * cross(b - a, c - a);
}

/// Affine frame of a triangle (a, b, c): the map x = a + J r takes the
/// reference triangle {r, s >= 0, r + s <= 1} onto the physical one, where J
/// has columns b - a and c - a. det = 2 * area is positive for
/// counterclockwise vertex order; callers reject nonpositive values.
struct TriFrame {
  Vec2 v0;
  double j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
  double det = 0.0;
  double i00 = 0.0, i01 = 0.0, i10 = 0.0, i11 = 0.0;  // inverse of J

  Vec2 to_physical(Vec2 r) const {
    return {v0.x + j00 * r.x + j01 * r.y, v0.y + j10 * r.x + j11 * r.y};
  }
  Vec2 to_reference(Vec2 x) const {
    const double dx = x.x - v0.x;
    const double dy = x.y - v0.y;
    return {i00 * dx + i01 * dy, i10 * dx + i11 * dy};
  }
  /// Pushforward J^{-T} g of a reference gradient.
  Vec2 gradient_to_physical(Vec2 g) const {
    return {i00 * g.x + i10 * g.y, i01 * g.x + i11 * g.y};
  }
};

inline TriFrame tri_frame(Vec2 a, Vec2 b, Vec2 c) {
  TriFrame f;
  f.v0 = a;
  f.j00 = b.x - a.x;
  f.j01 = c.x - a.x;
  f.j10 = b.y - a.y;
  f.j11 = c.y - a.y;
  f.det = f.j00 * f.j11 - f.j01 * f.j10;
  if (f.det != 0.0) {
    f.i00 = f.j11 / f.det;
    f.i01 = -f.j01 / f.det;
    f.i10 = -f.j10 / f.det;
    f.i11 = f.j00 / f.det;
  }
  return f;
}

/// Axis-aligned rectangle, used for domains and permeability regions.
struct Rect {
  double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diameter() const { return std::hypot(width(), height()); }
  double area() const { return width() * height(); }

  bool contains(Vec2 p, double tol = 0.0) const {
    return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol &&
           p.y <= ymax + tol;
  }
};

}  // namespace fracflow
