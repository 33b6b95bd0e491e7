#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cflow/energy.hpp"

namespace cflow {

/// Forward Euler on the penalized energy E_{eps,N}.
struct EpsilonFlow {
  double eps = 0.1;
};

/// Free forward Euler step on E_N followed by projection onto M.
struct ProjectedFlow {};

using Scheme = std::variant<EpsilonFlow, ProjectedFlow>;

enum class StopRule { GradNorm, EnergyRate, FixedTime };

struct Stopping {
  StopRule rule = StopRule::GradNorm;
  double final_time = 0.0;  // FixedTime only
};

struct SchemeConfig {
  Scheme scheme = ProjectedFlow{};
  std::optional<double> tau;  // empty: chosen once by backtracking linesearch
  double tol = 1e-9;
  Stopping stopping;
  std::size_t max_steps = 1'000'000;
  std::size_t snapshot_every = 100;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Radius r < reach of the tube M_r in the step restriction; also bounds
  /// the enclosure used when the reach is infinite.
  double tube_radius = kInfinity;
};

void validate(const SchemeConfig& config);

struct TraceRow {
  std::size_t step = 0;
  double time = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double mean_sq_dist = 0.0;
};

struct Snapshot {
  double time = 0.0;
  std::vector<Point> positions;
};

enum class Termination { Converged, MaxSteps, FixedTimeReached, Failed };

std::string to_string(Termination t);

struct Trace {
  std::vector<TraceRow> rows;
  std::vector<Snapshot> snapshots;
  Termination termination = Termination::MaxSteps;
  std::string failure;  // error text when termination == Failed
  double tau = 0.0;
  ParticleState final_state;
};

/// Energy column nonincreasing up to `slack` per step.
bool energy_nonincreasing(const Trace& trace, double slack = 1e-12);

ParticleState epsilon_step(const ParticleState& state, const Potential& W, const Domain& domain, double tau,
                           double eps, unsigned workers = 1);

ParticleState projected_step(const ParticleState& state, const Potential& W, const Domain& domain, double tau,
                             unsigned workers = 1);

/// R with M_r - M_r contained in B_R: 2 (L_M/2 + min(reach, r)).
double interaction_radius(const Domain& domain, double tube_radius = kInfinity);

/// reach / (8 M_v) with M_v = sup_{B_R} |grad W|; +infinity for infinite reach.
double max_stable_tau(const Domain& domain, const Potential& W, double tube_radius = kInfinity);

/// Energy the configured scheme decreases: E_{eps,N} or E_N.
double scheme_energy(const SchemeConfig& config, const ParticleState& state, const Potential& W,
                     const Domain& domain);

/// Armijo backtracking from min(1, max_stable_tau): halve tau until one trial
/// step satisfies E(new) <= E(old) - 1e-4 |x_new - x_old|^2 / (tau N). For
/// the epsilon flow the right-hand side equals 1e-4 tau N |grad E|^2.
double backtracking_linesearch(const ParticleState& state, const Potential& W, const Domain& domain,
                               const SchemeConfig& config);

Trace run(const SchemeConfig& config, const Domain& domain, const Potential& W, const ParticleState& initial);

// Initial-condition samplers.

struct UniformBox {
  Point lower;
  Point upper;
  std::size_t count = 0;
};

/// Cell-centred grid on [lower, upper] with dims[k] points along axis k,
/// each point jittered uniformly in [-jitter, jitter] per coordinate.
struct GridSpec {
  Point lower;
  Point upper;
  std::array<std::size_t, 2> dims{1, 1};
  double jitter = 0.0;
};

/// Grid points kept only if they lie in M.
struct PerturbedGrid {
  GridSpec grid;
};

/// Grid points moved to their closest point on M.
struct ProjectedPerturbedGrid {
  GridSpec grid;
};

struct ExplicitPoints {
  std::vector<Point> points;
};

using InitialSpec = std::variant<UniformBox, PerturbedGrid, ProjectedPerturbedGrid, ExplicitPoints>;

ParticleState sample_initial(const InitialSpec& spec, const Domain& domain, std::uint64_t seed);

}  // namespace cflow
