#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cflow/geometry.hpp"
#include "cflow/potential.hpp"

namespace cflow {

/// N equal-mass particles (mass 1/N each, never stored) and the clock.
struct ParticleState {
  std::vector<Point> positions;
  double time = 0.0;
  std::size_t step_index = 0;

  std::size_t size() const { return positions.size(); }
  int dim() const { return positions.empty() ? 0 : positions.front().dim; }
};

/// Check N >= 1, finite coordinates, and a common dimension.
void validate_state(const ParticleState& state, int expected_dim);

/// E_N = (1/2N^2) sum_i sum_j W(x_i - x_j), self terms included.
double interaction_energy(const ParticleState& state, const Potential& W);

/// E_N with the i = j terms removed, i.e. E_N - W(0)/(2N).
double interaction_energy_without_self(const ParticleState& state, const Potential& W);

/// E_{eps,N} = E_N + (1/(N eps)) sum_i d_M(x_i)^2.
double penalized_energy(const ParticleState& state, const Potential& W, const Domain& domain, double eps);

/// F_i = N grad_i E_N = (1/N) sum_{j != i} grad W(x_i - x_j). Particles are
/// split across `workers` threads; every F_i is summed over ascending j, so
/// the result is bitwise independent of the worker count.
std::vector<Point> interaction_force(const ParticleState& state, const Potential& W, unsigned workers = 1);

/// F_i = N grad_i E_{eps,N} = interaction force + (2/eps)(x_i - P(x_i)).
/// Throws OutsideReachTube if some x_i outside the reach tube has no unique
/// closest point on M.
std::vector<Point> penalized_force(const ParticleState& state, const Potential& W, const Domain& domain, double eps,
                                   unsigned workers = 1);

/// Euclidean norm of the stacked gradient (grad_1 E, ..., grad_N E), i.e. of
/// the forces divided by N.
double gradient_norm(const std::vector<Point>& forces);

double gradient_norm(const ParticleState& state, const Potential& W, const Domain& domain,
                     std::optional<double> eps, unsigned workers = 1);

/// (1/N) sum_i d_M(x_i)^2.
double mean_sq_distance(const ParticleState& state, const Domain& domain);

}  // namespace cflow
