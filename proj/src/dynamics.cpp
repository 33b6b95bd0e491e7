#include "cflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cflow {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

bool is_projected(const SchemeConfig& config) { return std::holds_alternative<ProjectedFlow>(config.scheme); }

std::vector<Point> scheme_forces(const SchemeConfig& config, const ParticleState& state, const Potential& W,
                                 const Domain& domain) {
  if (const auto* e = std::get_if<EpsilonFlow>(&config.scheme)) {
    return penalized_force(state, W, domain, e->eps, config.workers);
  }
  return interaction_force(state, W, config.workers);
}

// x <- x - tau F, then project when the scheme asks for it.
ParticleState advance(const ParticleState& state, const std::vector<Point>& force, double tau, const Domain& domain,
                      bool projected) {
  ParticleState next;
  next.positions.reserve(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    Point y = state.positions[i] - tau * force[i];
    if (!is_finite(y)) throw Error(Errc::NonFiniteState, "particle " + std::to_string(i) + " left the finite range");
    next.positions.push_back(projected ? project(domain, y) : y);
  }
  next.time = state.time + tau;
  next.step_index = state.step_index + 1;
  return next;
}

double moved_sq(const ParticleState& a, const ParticleState& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += norm_sq(a.positions[i] - b.positions[i]);
  return sum;
}

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::vector<Point> grid_points(const GridSpec& g, std::mt19937_64& rng) {
  const int dim = g.lower.dim;
  if (g.upper.dim != dim) throw Error(Errc::DimensionMismatch, "grid bounds differ in dimension");
  if (!(g.jitter >= 0.0)) throw Error(Errc::InvalidArgument, "jitter must be nonnegative");
  const std::size_t nx = g.dims[0];
  const std::size_t ny = dim == 2 ? g.dims[1] : 1;
  if (nx == 0 || ny == 0) throw Error(Errc::InvalidArgument, "grid dimensions must be positive");
  const double hx = (g.upper[0] - g.lower[0]) / double(nx);
  const double hy = dim == 2 ? (g.upper[1] - g.lower[1]) / double(ny) : 0.0;

  std::vector<Point> out;
  out.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      Point p = Point::zero(dim);
      p[0] = g.lower[0] + (double(i) + 0.5) * hx + uniform(rng, -g.jitter, g.jitter);
      if (dim == 2) p[1] = g.lower[1] + (double(j) + 0.5) * hy + uniform(rng, -g.jitter, g.jitter);
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::MaxSteps: return "MaxSteps";
    case Termination::FixedTimeReached: return "FixedTimeReached";
    case Termination::Failed: return "Failed";
  }
  return "Unknown";
}

void validate(const SchemeConfig& config) {
  if (const auto* e = std::get_if<EpsilonFlow>(&config.scheme); e && !(e->eps > 0.0)) {
    throw Error(Errc::InvalidConfig, "eps must be positive");
  }
  if (config.tau && !(*config.tau > 0.0)) throw Error(Errc::InvalidConfig, "tau must be positive");
  if (!(config.tol > 0.0)) throw Error(Errc::InvalidConfig, "tol must be positive");
  if (config.stopping.rule == StopRule::FixedTime && !(config.stopping.final_time > 0.0)) {
    throw Error(Errc::InvalidConfig, "final time must be positive");
  }
  if (config.max_steps == 0) throw Error(Errc::InvalidConfig, "max_steps must be positive");
  if (config.snapshot_every == 0) throw Error(Errc::InvalidConfig, "snapshot_every must be positive");
  if (config.workers == 0) throw Error(Errc::InvalidConfig, "workers must be positive");
  if (!(config.tube_radius > 0.0)) throw Error(Errc::InvalidConfig, "tube radius must be positive");
}

bool energy_nonincreasing(const Trace& trace, double slack) {
  for (std::size_t k = 1; k < trace.rows.size(); ++k) {
    if (trace.rows[k].energy > trace.rows[k - 1].energy + slack) return false;
  }
  return true;
}

ParticleState epsilon_step(const ParticleState& state, const Potential& W, const Domain& domain, double tau,
                           double eps, unsigned workers) {
  if (!(tau > 0.0)) throw Error(Errc::InvalidArgument, "tau must be positive");
  return advance(state, penalized_force(state, W, domain, eps, workers), tau, domain, false);
}

ParticleState projected_step(const ParticleState& state, const Potential& W, const Domain& domain, double tau,
                             unsigned workers) {
  if (!(tau > 0.0)) throw Error(Errc::InvalidArgument, "tau must be positive");
  return advance(state, interaction_force(state, W, workers), tau, domain, true);
}

double interaction_radius(const Domain& domain, double tube_radius) {
  return 2.0 * (domain.diameter() / 2.0 + std::min(domain.reach(), tube_radius));
}

double max_stable_tau(const Domain& domain, const Potential& W, double tube_radius) {
  if (std::isinf(domain.reach())) return kInfinity;
  const double mv = W.grad_bound(interaction_radius(domain, tube_radius));
  return mv > 0.0 ? domain.reach() / (8.0 * mv) : kInfinity;
}

double scheme_energy(const SchemeConfig& config, const ParticleState& state, const Potential& W,
                     const Domain& domain) {
  if (const auto* e = std::get_if<EpsilonFlow>(&config.scheme)) return penalized_energy(state, W, domain, e->eps);
  return interaction_energy(state, W);
}

double backtracking_linesearch(const ParticleState& state, const Potential& W, const Domain& domain,
                               const SchemeConfig& config) {
  const double tau0 = std::min(1.0, max_stable_tau(domain, W, config.tube_radius));
  const auto force = scheme_forces(config, state, W, domain);
  const double g = gradient_norm(force);
  if (g < config.tol) return tau0;

  const double e0 = scheme_energy(config, state, W, domain);
  const double n = double(state.size());
  double tau = tau0;
  for (int k = 0; k <= kMaxHalvings; ++k, tau *= 0.5) {
    ParticleState trial;
    try {
      trial = advance(state, force, tau, domain, is_projected(config));
    } catch (const Error& err) {
      if (err.code() == Errc::OutsideReachTube || err.code() == Errc::NonFiniteState) continue;
      throw;
    }
    const double e1 = scheme_energy(config, trial, W, domain);
    if (std::isfinite(e1) && e1 <= e0 - kArmijo * moved_sq(state, trial) / (tau * n)) return tau;
  }
  throw Error(Errc::LinesearchFailed, "no sufficient decrease after " + std::to_string(kMaxHalvings) + " halvings");
}

Trace run(const SchemeConfig& config, const Domain& domain, const Potential& W, const ParticleState& initial) {
  validate(config);
  validate_state(initial, domain.dim());
  const bool projected = is_projected(config);
  if (projected) {
    for (const Point& x : initial.positions) {
      if (!on_domain(domain, x)) throw Error(Errc::NotOnDomain, "projected scheme needs initial particles on M");
    }
    if (config.tau && *config.tau > max_stable_tau(domain, W, config.tube_radius)) {
      throw Error(Errc::InvalidConfig, "tau exceeds reach / (8 M_v)");
    }
  }

  Trace trace;
  trace.final_state = initial;
  ParticleState& state = trace.final_state;
  try {
    trace.tau = config.tau ? *config.tau : backtracking_linesearch(initial, W, domain, config);
  } catch (const Error& err) {
    trace.termination = Termination::Failed;
    trace.failure = err.what();
    return trace;
  }
  const double tau = trace.tau;
  const double t0 = initial.time;
  const std::size_t k0 = initial.step_index;

  std::size_t fixed_steps = 0;
  if (config.stopping.rule == StopRule::FixedTime) {
    fixed_steps = static_cast<std::size_t>(std::ceil(config.stopping.final_time / tau - 1e-9));
  }

  auto snapshot = [&] { trace.snapshots.push_back(Snapshot{state.time, state.positions}); };

  try {
    std::vector<Point> force = scheme_forces(config, state, W, domain);
    double energy = scheme_energy(config, state, W, domain);
    trace.rows.push_back(TraceRow{state.step_index, state.time, energy, gradient_norm(force),
                                  mean_sq_distance(state, domain)});
    snapshot();

    if (config.stopping.rule == StopRule::GradNorm && trace.rows.back().grad_norm < config.tol) {
      trace.termination = Termination::Converged;
      return trace;
    }

    for (std::size_t taken = 0;;) {
      if (taken >= config.max_steps) {
        trace.termination = Termination::MaxSteps;
        break;
      }
      state = advance(state, force, tau, domain, projected);
      ++taken;
      // Clock from the step count so long runs do not accumulate drift.
      state.time = t0 + double(taken) * tau;
      state.step_index = k0 + taken;

      force = scheme_forces(config, state, W, domain);
      const double next_energy = scheme_energy(config, state, W, domain);
      const TraceRow row{state.step_index, state.time, next_energy, gradient_norm(force),
                         mean_sq_distance(state, domain)};
      trace.rows.push_back(row);
      if (taken % config.snapshot_every == 0) snapshot();

      bool done = false;
      switch (config.stopping.rule) {
        case StopRule::GradNorm: done = row.grad_norm < config.tol; break;
        case StopRule::EnergyRate: done = std::abs(next_energy - energy) / tau < config.tol; break;
        case StopRule::FixedTime: done = taken >= fixed_steps; break;
      }
      energy = next_energy;
      if (done) {
        trace.termination =
            config.stopping.rule == StopRule::FixedTime ? Termination::FixedTimeReached : Termination::Converged;
        break;
      }
    }
  } catch (const Error& err) {
    trace.termination = Termination::Failed;
    trace.failure = err.what();
  }
  if (trace.snapshots.empty() || trace.snapshots.back().time != state.time) snapshot();
  return trace;
}

ParticleState sample_initial(const InitialSpec& spec, const Domain& domain, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParticleState state;

  if (const auto* box = std::get_if<UniformBox>(&spec)) {
    require_dim(box->lower, domain.dim());
    require_dim(box->upper, domain.dim());
    if (box->count == 0) throw Error(Errc::EmptySample, "uniform box needs count >= 1");
    for (std::size_t k = 0; k < box->count; ++k) {
      Point p = Point::zero(domain.dim());
      for (int d = 0; d < domain.dim(); ++d) p[std::size_t(d)] = uniform(rng, box->lower[std::size_t(d)], box->upper[std::size_t(d)]);
      state.positions.push_back(p);
    }
  } else if (const auto* grid = std::get_if<PerturbedGrid>(&spec)) {
    require_dim(grid->grid.lower, domain.dim());
    for (const Point& p : grid_points(grid->grid, rng)) {
      if (on_domain(domain, p)) state.positions.push_back(p);
    }
  } else if (const auto* proj = std::get_if<ProjectedPerturbedGrid>(&spec)) {
    require_dim(proj->grid.lower, domain.dim());
    for (const Point& p : grid_points(proj->grid, rng)) state.positions.push_back(nearest(domain, p).point);
  } else {
    state.positions = std::get<ExplicitPoints>(spec).points;
  }

  if (state.positions.empty()) throw Error(Errc::EmptySample, "sampler produced no particles inside the domain");
  validate_state(state, domain.dim());
  return state;
}

}  // namespace cflow
