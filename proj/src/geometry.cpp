#include "cflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace cflow {
namespace detail {

namespace {

struct SegmentHit {
  std::size_t index = 0;
  Point point;
  double dist_sq = kInfinity;
};

SegmentHit closest_on_segment(const Point& a, const Point& b, const Point& x, std::size_t index) {
  const Point ab = b - a;
  const double len_sq = norm_sq(ab);
  double t = len_sq > 0.0 ? dot(x - a, ab) / len_sq : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  SegmentHit hit;
  hit.index = index;
  hit.point = a + t * ab;
  hit.dist_sq = norm_sq(x - hit.point);
  return hit;
}

// Compressed bucket lists: ids of bucket k are items[offsets[k] .. offsets[k+1]).
struct Buckets {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> items;
};

template <class ForEachCell>
Buckets build_buckets(std::size_t bucket_count, std::size_t item_count, ForEachCell for_each_cell) {
  Buckets b;
  b.offsets.assign(bucket_count + 1, 0);
  for (std::size_t i = 0; i < item_count; ++i) {
    for_each_cell(i, [&](std::size_t cell) { ++b.offsets[cell + 1]; });
  }
  for (std::size_t k = 0; k < bucket_count; ++k) b.offsets[k + 1] += b.offsets[k];
  b.items.resize(b.offsets.back());
  std::vector<std::uint32_t> fill(b.offsets.begin(), b.offsets.end() - 1);
  for (std::size_t i = 0; i < item_count; ++i) {
    for_each_cell(i, [&](std::size_t cell) { b.items[fill[cell]++] = static_cast<std::uint32_t>(i); });
  }
  return b;
}

}  // namespace

/// Uniform grid over the segments of a polyline plus horizontal bands for the
/// even-odd crossing test. Queries return exactly what a linear scan over
/// all segments would return.
class SegmentIndex {
 public:
  SegmentIndex(const std::vector<Point>& vertices, bool closed) : vertices_(vertices), closed_(closed) {
    const std::size_t nseg = segment_count();
    double xmin = kInfinity, xmax = -kInfinity, ymin = kInfinity, ymax = -kInfinity;
    for (const Point& v : vertices_) {
      xmin = std::min(xmin, v[0]);
      xmax = std::max(xmax, v[0]);
      ymin = std::min(ymin, v[1]);
      ymax = std::max(ymax, v[1]);
    }
    const double extent = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const auto per_side = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(double(nseg)))));
    cell_ = extent / double(per_side);
    x0_ = xmin;
    y0_ = ymin;
    nx_ = std::max<long>(1, static_cast<long>(std::ceil((xmax - xmin) / cell_)));
    ny_ = std::max<long>(1, static_cast<long>(std::ceil((ymax - ymin) / cell_)));

    grid_ = build_buckets(std::size_t(nx_ * ny_), nseg, [&](std::size_t s, auto&& emit) {
      const Point a = start(s), b = end(s);
      const long i0 = cell_x(std::min(a[0], b[0])), i1 = cell_x(std::max(a[0], b[0]));
      const long j0 = cell_y(std::min(a[1], b[1])), j1 = cell_y(std::max(a[1], b[1]));
      for (long j = j0; j <= j1; ++j)
        for (long i = i0; i <= i1; ++i) emit(std::size_t(j * nx_ + i));
    });

    band_count_ = ny_;
    bands_ = build_buckets(std::size_t(band_count_), nseg, [&](std::size_t s, auto&& emit) {
      const Point a = start(s), b = end(s);
      const long j0 = cell_y(std::min(a[1], b[1])), j1 = cell_y(std::max(a[1], b[1]));
      for (long j = j0; j <= j1; ++j) emit(std::size_t(j));
    });
  }

  std::size_t segment_count() const { return closed_ ? vertices_.size() : vertices_.size() - 1; }

  struct Result {
    SegmentHit best;
    bool unique = true;
  };

  Result nearest(const Point& x) const {
    constexpr double kTie = 1e-12;
    Result out;
    std::vector<SegmentHit> near_ties;
    double best_dist = kInfinity;

    const long cx = cell_x(x[0]), cy = cell_y(x[1]);
    for (long r = 0;; ++r) {
      const long i0 = cx - r, i1 = cx + r, j0 = cy - r, j1 = cy + r;
      for (long j = std::max(j0, 0L); j <= std::min(j1, ny_ - 1); ++j) {
        const bool edge_row = (j == j0 || j == j1);
        for (long i = std::max(i0, 0L); i <= std::min(i1, nx_ - 1); ++i) {
          if (!edge_row && i != i0 && i != i1) continue;
          const auto cell = std::size_t(j * nx_ + i);
          for (auto k = grid_.offsets[cell]; k < grid_.offsets[cell + 1]; ++k) {
            const std::size_t s = grid_.items[k];
            const SegmentHit hit = closest_on_segment(start(s), end(s), x, s);
            if (hit.dist_sq < out.best.dist_sq || (hit.dist_sq == out.best.dist_sq && s < out.best.index)) {
              out.best = hit;
              best_dist = std::sqrt(hit.dist_sq);
            }
            if (std::sqrt(hit.dist_sq) <= best_dist + kTie) near_ties.push_back(hit);
          }
        }
      }
      // Lower bound on the distance from x to any cell outside the block.
      double bound = kInfinity;
      if (i0 > 0) bound = std::min(bound, x[0] - (x0_ + double(i0) * cell_));
      if (i1 < nx_ - 1) bound = std::min(bound, (x0_ + double(i1 + 1) * cell_) - x[0]);
      if (j0 > 0) bound = std::min(bound, x[1] - (y0_ + double(j0) * cell_));
      if (j1 < ny_ - 1) bound = std::min(bound, (y0_ + double(j1 + 1) * cell_) - x[1]);
      if (bound == kInfinity) break;
      if (std::max(bound, 0.0) > best_dist + kTie) break;
    }

    for (const SegmentHit& h : near_ties) {
      if (std::sqrt(h.dist_sq) <= best_dist + kTie && norm(h.point - out.best.point) > kOnDomainTol) {
        out.unique = false;
        break;
      }
    }
    return out;
  }

  /// Even-odd rule; points exactly on the boundary may land on either side.
  bool inside(const Point& x) const {
    const double y = x[1];
    if (y < y0_ || y > y0_ + double(ny_) * cell_) return false;
    const auto band = std::size_t(cell_y(y));
    bool in = false;
    for (auto k = bands_.offsets[band]; k < bands_.offsets[band + 1]; ++k) {
      const std::size_t s = bands_.items[k];
      const Point a = start(s), b = end(s);
      if ((a[1] > y) != (b[1] > y)) {
        const double cross = (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]) + a[0];
        if (x[0] < cross) in = !in;
      }
    }
    return in;
  }

 private:
  Point start(std::size_t s) const { return vertices_[s]; }
  Point end(std::size_t s) const { return vertices_[(s + 1) % vertices_.size()]; }

  long cell_x(double v) const { return std::clamp(static_cast<long>(std::floor((v - x0_) / cell_)), 0L, nx_ - 1); }
  long cell_y(double v) const { return std::clamp(static_cast<long>(std::floor((v - y0_) / cell_)), 0L, ny_ - 1); }

  std::vector<Point> vertices_;
  bool closed_;
  double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
  long nx_ = 1, ny_ = 1;
  long band_count_ = 1;
  Buckets grid_;
  Buckets bands_;
};

}  // namespace detail

namespace {

Polyline make_polyline(std::vector<Point> vertices, bool closed, double declared_reach) {
  if (vertices.size() < 2) throw Error(Errc::InvalidArgument, "polyline needs at least 2 vertices");
  for (const Point& v : vertices) {
    require_dim(v, 2);
    if (!is_finite(v)) throw Error(Errc::InvalidArgument, "polyline vertex is not finite");
  }
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    if (vertices[i] == vertices[i + 1]) throw Error(Errc::InvalidArgument, "repeated consecutive polyline vertex");
  }
  if (closed && vertices.front() == vertices.back()) {
    throw Error(Errc::InvalidArgument, "closed polyline must not repeat its first vertex");
  }
  if (!(declared_reach > 0.0)) throw Error(Errc::InvalidArgument, "declared reach must be positive");

  Polyline line;
  line.closed = closed;
  line.declared_reach = declared_reach;
  if (closed) {
    double area2 = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const Point& a = vertices[i];
      const Point& b = vertices[(i + 1) % vertices.size()];
      area2 += a[0] * b[1] - b[0] * a[1];
    }
    line.orientation = area2 >= 0.0 ? 1 : -1;
  }
  line.index = std::make_shared<const detail::SegmentIndex>(vertices, closed);
  line.vertices = std::move(vertices);
  return line;
}

double vertex_diameter(const std::vector<Point>& v) {
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, norm_sq(v[i] - v[j]));
  return std::sqrt(best);
}

Nearest nearest_on_polyline(const Polyline& line, const Point& x) {
  const auto r = line.index->nearest(x);
  return Nearest{r.best.point, std::sqrt(r.best.dist_sq), r.unique};
}

Nearest nearest_impl(const IntervalUnion& u, const Point& x) {
  Nearest best{Point(0.0), kInfinity, true};
  for (const Interval& iv : u.intervals) {
    const double p = std::clamp(x[0], iv.lo, iv.hi);
    const double d = std::abs(x[0] - p);
    if (d < best.distance) best = Nearest{Point(p), d, true};
  }
  for (const Interval& iv : u.intervals) {
    const double p = std::clamp(x[0], iv.lo, iv.hi);
    if (std::abs(std::abs(x[0] - p) - best.distance) <= 1e-12 && std::abs(p - best.point[0]) > kOnDomainTol) {
      best.unique = false;
    }
  }
  return best;
}

Nearest nearest_impl(const ClosedDisc& d, const Point& x) {
  const Point rel = x - d.center;
  const double r = norm(rel);
  if (r <= d.radius) return Nearest{x, 0.0, true};
  // Pull the rounded image inside so that projecting it again is the identity.
  Point p = d.center + rel * (d.radius / r);
  for (double shrink = d.radius / r; norm(p - d.center) > d.radius;) {
    shrink = std::nextafter(shrink, 0.0);
    p = d.center + rel * shrink;
  }
  return Nearest{p, r - d.radius, true};
}

Nearest nearest_impl(const Polyline& line, const Point& x) { return nearest_on_polyline(line, x); }

Nearest nearest_impl(const PolygonRegion& region, const Point& x) {
  if (region.boundary.index->inside(x)) return Nearest{x, 0.0, true};
  return nearest_on_polyline(region.boundary, x);
}

// Unit normal to the discrete curve at its point p; `outward` is only
// meaningful for closed curves.
struct CurveFrame {
  Point normal;
  bool at_open_end = false;
  Point end_tangent;  // outward tangent at an open end
};

CurveFrame curve_frame(const Polyline& line, const Point& p) {
  const auto hit = line.index->nearest(p);
  const std::size_t n = line.vertices.size();
  const std::size_t s = hit.best.index;
  std::size_t vertex = n;  // n means "interior of segment s"
  if (norm(hit.best.point - line.segment_start(s)) <= kOnDomainTol) vertex = s;
  else if (norm(hit.best.point - line.segment_end(s)) <= kOnDomainTol) vertex = (s + 1) % n;

  CurveFrame frame;
  Point tangent;
  if (vertex == n) {
    tangent = line.segment_end(s) - line.segment_start(s);
  } else if (line.closed) {
    tangent = line.vertices[(vertex + 1) % n] - line.vertices[(vertex + n - 1) % n];
  } else if (vertex == 0) {
    tangent = line.vertices[1] - line.vertices[0];
    frame.at_open_end = true;
    frame.end_tangent = -tangent / norm(tangent);
  } else if (vertex == n - 1) {
    tangent = line.vertices[n - 1] - line.vertices[n - 2];
    frame.at_open_end = true;
    frame.end_tangent = tangent / norm(tangent);
  } else {
    tangent = line.vertices[vertex + 1] - line.vertices[vertex - 1];
  }
  tangent = tangent / norm(tangent);
  frame.normal = Point(tangent[1], -tangent[0]);
  if (line.orientation < 0) frame.normal = -frame.normal;
  return frame;
}

}  // namespace

Domain Domain::interval_union(std::vector<Interval> intervals) {
  if (intervals.empty()) throw Error(Errc::InvalidArgument, "interval union needs at least one interval");
  for (const Interval& iv : intervals) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
      throw Error(Errc::InvalidArgument, "interval needs finite a <= b");
    }
  }
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double min_gap = kInfinity;
  for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
    const double gap = intervals[i + 1].lo - intervals[i].hi;
    if (!(gap > 0.0)) throw Error(Errc::InvalidArgument, "intervals must be pairwise disjoint");
    min_gap = std::min(min_gap, gap);
  }
  const double diameter = intervals.back().hi - intervals.front().lo;
  return Domain(IntervalUnion{std::move(intervals)}, 1, min_gap / 2.0, diameter);
}

Domain Domain::disc(Point center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(Errc::InvalidArgument, "disc radius must be positive");
  if (!is_finite(center)) throw Error(Errc::InvalidArgument, "disc center is not finite");
  const int dim = center.dim;
  return Domain(ClosedDisc{center, radius}, dim, kInfinity, 2.0 * radius);
}

Domain Domain::polyline(std::vector<Point> vertices, bool closed, double declared_reach) {
  Polyline line = make_polyline(std::move(vertices), closed, declared_reach);
  const double diameter = vertex_diameter(line.vertices);
  const double r = line.declared_reach;
  return Domain(std::move(line), 2, r, diameter);
}

Domain Domain::region(std::vector<Point> boundary, double declared_reach) {
  if (boundary.size() < 3) throw Error(Errc::InvalidArgument, "region boundary needs at least 3 vertices");
  Polyline line = make_polyline(std::move(boundary), true, declared_reach);
  const double diameter = vertex_diameter(line.vertices);
  const double r = line.declared_reach;
  return Domain(PolygonRegion{std::move(line)}, 2, r, diameter);
}

Nearest nearest(const Domain& domain, const Point& x) {
  require_dim(x, domain.dim());
  return std::visit([&](const auto& shape) { return nearest_impl(shape, x); }, domain.shape());
}

double distance(const Domain& domain, const Point& x) { return nearest(domain, x).distance; }

Point project(const Domain& domain, const Point& x) {
  const Nearest n = nearest(domain, x);
  if (n.distance >= domain.reach()) {
    throw Error(Errc::OutsideReachTube, "distance " + std::to_string(n.distance) + " >= reach " +
                                            std::to_string(domain.reach()));
  }
  return n.point;
}

double reach(const Domain& domain) { return domain.reach(); }

bool on_domain(const Domain& domain, const Point& x, double tol) { return distance(domain, x) <= tol; }

std::vector<Point> proximal_normals(const Domain& domain, const Point& p) {
  if (!on_domain(domain, p)) throw Error(Errc::NotOnDomain, "point is not on the domain");

  if (const auto* u = domain.as<IntervalUnion>()) {
    std::vector<Point> out;
    for (const Interval& iv : u->intervals) {
      if (p[0] < iv.lo - kOnDomainTol || p[0] > iv.hi + kOnDomainTol) continue;
      if (std::abs(p[0] - iv.hi) <= kOnDomainTol) out.emplace_back(1.0);
      if (std::abs(p[0] - iv.lo) <= kOnDomainTol) out.emplace_back(-1.0);
      break;
    }
    return out;
  }
  if (const auto* d = domain.as<ClosedDisc>()) {
    const Point rel = p - d->center;
    const double r = norm(rel);
    if (r < d->radius - kOnDomainTol) return {};
    return {rel / r};
  }
  if (const auto* line = domain.as<Polyline>()) {
    const CurveFrame f = curve_frame(*line, p);
    std::vector<Point> out{f.normal, -f.normal};
    if (f.at_open_end) out.push_back(f.end_tangent);
    return out;
  }
  const auto& region = *domain.as<PolygonRegion>();
  if (nearest_on_polyline(region.boundary, p).distance > kOnDomainTol) return {};
  return {curve_frame(region.boundary, p).normal};
}

std::vector<Point> bean_boundary_vertices(int n) {
  if (n < 8 || n % 2 != 0) {
    throw Error(Errc::InvalidResolution, "bean resolution must be an even integer >= 8, got " + std::to_string(n));
  }
  const int half = n / 2;
  auto height = [](double x) { return 0.4 * std::sqrt(std::max(0.0, 1.0 - x * x)) * (1.1 - std::cos(3.0 * x)); };
  auto abscissa = [half](int i) { return -1.0 + 2.0 * double(i) / double(half); };

  std::vector<Point> v;
  v.reserve(std::size_t(n));
  for (int i = 0; i <= half; ++i) v.emplace_back(abscissa(i), height(abscissa(i)));
  for (int i = half - 1; i >= 1; --i) v.emplace_back(abscissa(i), -height(abscissa(i)));
  return v;
}

Domain sample_bean_boundary(int n, double declared_reach) {
  return Domain::polyline(bean_boundary_vertices(n), true, declared_reach);
}

Domain sample_bean_region(int n, double declared_reach) {
  return Domain::region(bean_boundary_vertices(n), declared_reach);
}

Domain sample_circle(int n, Point center, double radius) {
  if (n < 3) throw Error(Errc::InvalidResolution, "circle needs at least 3 vertices");
  std::vector<Point> v;
  v.reserve(std::size_t(n));
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * double(k) / double(n);
    v.push_back(center + radius * Point(std::cos(theta), std::sin(theta)));
  }
  return Domain::polyline(std::move(v), true, radius);
}

}  // namespace cflow
