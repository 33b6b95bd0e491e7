#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "cflow/error.hpp"

namespace cflow {

/// A point (or vector) in R^1 or R^2. Unused coordinates are kept at zero so
/// that arithmetic never needs to branch on the dimension.
struct Point {
  std::array<double, 2> c{0.0, 0.0};
  int dim = 2;

  constexpr Point() = default;
  constexpr explicit Point(double x) : c{x, 0.0}, dim(1) {}
  constexpr Point(double x, double y) : c{x, y}, dim(2) {}

  constexpr double operator[](std::size_t i) const { return c[i]; }
  constexpr double& operator[](std::size_t i) { return c[i]; }

  static constexpr Point zero(int dim) { return dim == 1 ? Point(0.0) : Point(0.0, 0.0); }

  constexpr Point& operator+=(const Point& o) {
    c[0] += o.c[0];
    c[1] += o.c[1];
    return *this;
  }
  constexpr Point& operator-=(const Point& o) {
    c[0] -= o.c[0];
    c[1] -= o.c[1];
    return *this;
  }
  constexpr Point& operator*=(double s) {
    c[0] *= s;
    c[1] *= s;
    return *this;
  }

  friend constexpr bool operator==(const Point&, const Point&) = default;
};

constexpr Point operator+(Point a, const Point& b) { return a += b; }
constexpr Point operator-(Point a, const Point& b) { return a -= b; }
constexpr Point operator-(Point a) { return a *= -1.0; }
constexpr Point operator*(Point a, double s) { return a *= s; }
constexpr Point operator*(double s, Point a) { return a *= s; }
constexpr Point operator/(Point a, double s) { return a *= 1.0 / s; }

constexpr double dot(const Point& a, const Point& b) { return a.c[0] * b.c[0] + a.c[1] * b.c[1]; }
constexpr double norm_sq(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::hypot(a.c[0], a.c[1]); }

inline bool is_finite(const Point& a) { return std::isfinite(a.c[0]) && std::isfinite(a.c[1]); }

inline void require_dim(const Point& p, int dim) {
  if (p.dim != dim) {
    throw Error(Errc::DimensionMismatch,
                "point has dimension " + std::to_string(p.dim) + ", expected " + std::to_string(dim));
  }
}

}  // namespace cflow
