#include "cflow/energy.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace cflow {

namespace {

template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

}  // namespace

void validate_state(const ParticleState& state, int expected_dim) {
  if (state.positions.empty()) throw Error(Errc::InvalidArgument, "particle state needs N >= 1");
  for (const Point& x : state.positions) {
    require_dim(x, expected_dim);
    if (!is_finite(x)) throw Error(Errc::NonFiniteState, "particle position is not finite");
  }
}

double interaction_energy(const ParticleState& state, const Potential& W) {
  if (state.positions.empty()) throw Error(Errc::InvalidArgument, "particle state needs N >= 1");
  const auto& x = state.positions;
  const double n = double(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) sum += W.eval(x[i] - x[j]);
  return sum / (2.0 * n * n);
}

double interaction_energy_without_self(const ParticleState& state, const Potential& W) {
  if (state.positions.empty()) throw Error(Errc::InvalidArgument, "particle state needs N >= 1");
  const auto& x = state.positions;
  const double n = double(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (i != j) sum += W.eval(x[i] - x[j]);
  return sum / (2.0 * n * n);
}

double penalized_energy(const ParticleState& state, const Potential& W, const Domain& domain, double eps) {
  if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "eps must be positive");
  double penalty = 0.0;
  for (const Point& x : state.positions) {
    const double d = distance(domain, x);
    penalty += d * d;
  }
  return interaction_energy(state, W) + penalty / (double(state.size()) * eps);
}

std::vector<Point> interaction_force(const ParticleState& state, const Potential& W, unsigned workers) {
  const auto& x = state.positions;
  const std::size_t n = x.size();
  const double inv_n = 1.0 / double(n);
  std::vector<Point> force(n, Point::zero(state.dim()));
  parallel_for(n, workers, [&](std::size_t i) {
    Point acc = Point::zero(x[i].dim);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) acc += W.grad(x[i] - x[j]);
    force[i] = acc * inv_n;
  });
  return force;
}

std::vector<Point> penalized_force(const ParticleState& state, const Potential& W, const Domain& domain, double eps,
                                   unsigned workers) {
  if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "eps must be positive");
  std::vector<Point> force = interaction_force(state, W, workers);
  for (std::size_t i = 0; i < force.size(); ++i) {
    const Point& x = state.positions[i];
    const Nearest p = nearest(domain, x);
    // Inside the declared reach tube a polyline tie is a sampling artifact of
    // the smooth curve (e.g. just inside a convex vertex); take the first.
    if (!p.unique && p.distance >= domain.reach()) {
      throw Error(Errc::OutsideReachTube, "closest point on M is not unique");
    }
    force[i] += (2.0 / eps) * (x - p.point);
  }
  return force;
}

double gradient_norm(const std::vector<Point>& forces) {
  const double n = double(forces.size());
  double sum = 0.0;
  for (const Point& f : forces) sum += norm_sq(f / n);
  return std::sqrt(sum);
}

double gradient_norm(const ParticleState& state, const Potential& W, const Domain& domain, std::optional<double> eps,
                     unsigned workers) {
  if (eps) return gradient_norm(penalized_force(state, W, domain, *eps, workers));
  return gradient_norm(interaction_force(state, W, workers));
}

double mean_sq_distance(const ParticleState& state, const Domain& domain) {
  double sum = 0.0;
  for (const Point& x : state.positions) {
    const double d = distance(domain, x);
    sum += d * d;
  }
  return sum / double(state.size());
}

}  // namespace cflow
