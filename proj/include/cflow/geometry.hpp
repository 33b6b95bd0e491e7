#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <variant>
#include <vector>

#include "cflow/point.hpp"

namespace cflow {

/// Absolute tolerance for "x lies on M" checks.
inline constexpr double kOnDomainTol = 1e-9;

/// Default declared reach of the sampled bean boundary. The neck of the bean
/// has half-width 0.04, which bounds the true reach from above.
inline constexpr double kBeanDefaultReach = 0.035;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Finite union of pairwise disjoint closed intervals in R (degenerate
/// intervals are isolated points).
struct IntervalUnion {
  std::vector<Interval> intervals;  // sorted, disjoint
};

struct ClosedDisc {
  Point center;
  double radius = 1.0;
};

namespace detail {
class SegmentIndex;
}

/// Piecewise linear curve; carries a user-declared reach.
struct Polyline {
  std::vector<Point> vertices;
  bool closed = false;
  double declared_reach = 0.0;
  /// +1 for counter-clockwise closed curves, -1 for clockwise, 0 for open.
  int orientation = 0;
  std::shared_ptr<const detail::SegmentIndex> index;

  std::size_t segment_count() const { return closed ? vertices.size() : vertices.size() - 1; }
  Point segment_start(std::size_t i) const { return vertices[i]; }
  Point segment_end(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }
};

/// Closed planar region whose boundary is a closed polyline.
struct PolygonRegion {
  Polyline boundary;
};

/// Compact positive-reach subset of R^1 or R^2. Immutable once built; copies
/// share the spatial index of polyline kinds.
class Domain {
 public:
  using Shape = std::variant<IntervalUnion, ClosedDisc, Polyline, PolygonRegion>;

  static Domain interval_union(std::vector<Interval> intervals);
  static Domain disc(Point center, double radius);
  static Domain polyline(std::vector<Point> vertices, bool closed, double declared_reach);
  static Domain region(std::vector<Point> boundary, double declared_reach);

  const Shape& shape() const { return shape_; }
  int dim() const { return dim_; }
  double reach() const { return reach_; }
  double diameter() const { return diameter_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&shape_);
  }

 private:
  Domain(Shape shape, int dim, double reach, double diameter)
      : shape_(std::move(shape)), dim_(dim), reach_(reach), diameter_(diameter) {}

  Shape shape_;
  int dim_;
  double reach_;
  double diameter_;
};

/// Result of a closest-point query. `unique` is false when a second,
/// distinct point of M is equally close (to 1e-12).
struct Nearest {
  Point point;
  double distance = 0.0;
  bool unique = true;
};

double distance(const Domain& domain, const Point& x);

/// Closest point with ties broken by lowest component/segment index. Never
/// throws for ties; reports them through Nearest::unique.
Nearest nearest(const Domain& domain, const Point& x);

/// Projection onto M, defined inside the reach tube. Throws OutsideReachTube
/// when distance(x) >= reach.
Point project(const Domain& domain, const Point& x);

double reach(const Domain& domain);

bool on_domain(const Domain& domain, const Point& x, double tol = kOnDomainTol);

/// Finite sample of unit proximal normals at a point of M. For polyline
/// curves the normals are those of the underlying smooth curve, estimated at
/// vertices from the neighbouring vertices.
std::vector<Point> proximal_normals(const Domain& domain, const Point& p);

/// Vertices of the bean boundary: upper branch left to right, then lower
/// branch right to left; (-1,0) and (1,0) appear once each.
std::vector<Point> bean_boundary_vertices(int n);

Domain sample_bean_boundary(int n, double declared_reach = kBeanDefaultReach);
Domain sample_bean_region(int n, double declared_reach = kBeanDefaultReach);

/// Closed polyline through n equally spaced points of a circle, starting at
/// angle 0 and running counter-clockwise. Declared reach is the radius.
Domain sample_circle(int n, Point center = Point(0.0, 0.0), double radius = 1.0);

}  // namespace cflow
