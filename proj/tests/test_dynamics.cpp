#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cflow/csv.hpp"
#include "cflow/dynamics.hpp"
#include "cflow/wasserstein.hpp"

namespace {

using namespace cflow;

ParticleState state_of(std::vector<Point> p) {
  ParticleState s;
  s.positions = std::move(p);
  return s;
}

const Domain& unit_interval() {
  static const Domain d = Domain::interval_union({{-1.0, 1.0}});
  return d;
}

SchemeConfig epsilon_config(double eps) {
  SchemeConfig c;
  c.scheme = EpsilonFlow{eps};
  return c;
}

// Random points of the sampled circle.
ParticleState circle_state(const Domain& circle, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  std::vector<Point> p;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = u(rng);
    p.push_back(nearest(circle, Point(std::cos(a), std::sin(a))).point);
  }
  return state_of(std::move(p));
}

TEST(EpsilonStep, Examples) {
  const auto s = epsilon_step(state_of({Point(2.0)}), Potential::quadratic(), unit_interval(), 0.01, 0.1);
  EXPECT_NEAR(s.positions[0][0], 1.8, 1e-15);
  EXPECT_DOUBLE_EQ(s.time, 0.01);
  EXPECT_EQ(s.step_index, 1u);

  const Domain wide = Domain::interval_union({{-2.0, 2.0}});
  const auto t = epsilon_step(state_of({Point(-1.0), Point(1.0)}), Potential::quadratic(), wide, 0.1, 0.3);
  EXPECT_NEAR(t.positions[0][0], -0.8, 1e-15);
  EXPECT_NEAR(t.positions[1][0], 0.8, 1e-15);

  const auto fixed = epsilon_step(state_of({Point(0.5), Point(0.5)}), Potential::quadratic(), unit_interval(), 0.2, 0.1);
  EXPECT_EQ(fixed.positions[0], Point(0.5));
  EXPECT_EQ(fixed.positions[1], Point(0.5));
  EXPECT_DOUBLE_EQ(fixed.time, 0.2);
}

TEST(ProjectedStep, Examples) {
  const Domain circle = sample_circle(4096);
  // The free step moves both particles radially inward by 0.2. On the sampled
  // circle the closest point of (0.8, 0) is the foot on one of the two chords
  // at the vertex (1, 0), within 0.2 * (chord angle / 2) of it.
  const auto s = projected_step(state_of({Point(1.0, 0.0), Point(-1.0, 0.0)}), Potential::quadratic(), circle, 0.1);
  const double chord = 0.2 * std::sin(M_PI / 4096.0) * 1.0001;
  EXPECT_LE(norm(s.positions[0] - Point(1.0, 0.0)), chord);
  EXPECT_LE(norm(s.positions[1] - Point(-1.0, 0.0)), chord);

  const auto one = projected_step(state_of({Point(0.0, 1.0)}), Potential::inverse_quadratic(1.0, 1.0), circle, 0.01);
  EXPECT_LE(norm(one.positions[0] - Point(0.0, 1.0)), 1e-15);
  const Domain disc = Domain::disc(Point(0.0, 0.0), 1.0);
  const auto pair = projected_step(state_of({Point(1.0, 0.0), Point(-1.0, 0.0)}), Potential::quadratic(), disc, 0.1);
  EXPECT_EQ(pair.positions[0], Point(0.8, 0.0));

  const Domain paper = Domain::interval_union({{-1.0, 1.0}, {1.5, 1.5}});
  const auto iso = projected_step(state_of({Point(1.5)}), Potential::inverse_quadratic(-1.0, 1.0), paper, 0.1);
  EXPECT_EQ(iso.positions[0], Point(1.5));
}

TEST(MaxStableTau, Examples) {
  EXPECT_DOUBLE_EQ(max_stable_tau(sample_circle(512), Potential::quadratic(), 1.0), 1.0 / 64.0);
  EXPECT_TRUE(std::isinf(max_stable_tau(Domain::disc(Point(0.0, 0.0), 1.0), Potential::quadratic())));
  const double bean = max_stable_tau(sample_bean_boundary(4096, 0.05), Potential::inverse_quadratic(1.0, 1.0));
  EXPECT_NEAR(bean, 0.05 / (8.0 * 3.0 * std::sqrt(3.0) / 8.0), 1e-12);
  EXPECT_NEAR(bean, 9.62e-3, 1e-5);
}

TEST(Linesearch, EquilibriumReturnsInitialStep) {
  SchemeConfig c = epsilon_config(0.1);
  const auto s = state_of({Point(0.3), Point(0.3)});
  EXPECT_EQ(backtracking_linesearch(s, Potential::quadratic(), unit_interval(), c), 1.0);
  SchemeConfig p;
  const Domain circle = sample_circle(256);
  EXPECT_EQ(backtracking_linesearch(state_of({Point(1.0, 0.0)}), Potential::quadratic(), circle, p),
            max_stable_tau(circle, Potential::quadratic()));
}

TEST(Linesearch, OracleLoopSinglePenalizedParticle) {
  // Oracle: E(x) = d(x)^2 / eps for N = 1 and W = |x|^2; halve from 1.
  auto energy = [](double x) {
    const double d = std::max(0.0, std::abs(x) - 1.0);
    return d * d / 0.1;
  };
  const double x0 = 2.0, f = 2.0 / 0.1 * (x0 - 1.0);
  double expected = 1.0;
  while (!(energy(x0 - expected * f) <= energy(x0) - 1e-4 * expected * f * f)) expected *= 0.5;

  const double tau = backtracking_linesearch(state_of({Point(x0)}), Potential::quadratic(), unit_interval(),
                                             epsilon_config(0.1));
  EXPECT_EQ(tau, expected);
  EXPECT_EQ(tau, 0.125);
}

TEST(Linesearch, AcceptedStepDecreasesEnergy) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.75, 1.75);
  std::vector<Point> p;
  for (int i = 0; i < 40; ++i) p.emplace_back(u(rng));
  const auto s = state_of(p);
  const Domain paper = Domain::interval_union({{-1.0, 1.0}, {1.5, 1.5}});
  const SchemeConfig c = epsilon_config(0.1);
  const Potential W = Potential::quadratic();
  const double tau = backtracking_linesearch(s, W, paper, c);
  const double g = gradient_norm(s, W, paper, 0.1);
  const auto next = epsilon_step(s, W, paper, tau, 0.1);
  EXPECT_LE(penalized_energy(next, W, paper, 0.1), penalized_energy(s, W, paper, 0.1) - 1e-4 * tau * 40.0 * g * g);
}

TEST(Run, EquilibriumStopsAtStepZero) {
  SchemeConfig c;
  c.tol = 1e-9;
  const Domain circle = sample_circle(256);
  const auto t = run(c, circle, Potential::inverse_quadratic(-1.0, 1.0), state_of({Point(1.0, 0.0), Point(1.0, 0.0)}));
  EXPECT_EQ(t.termination, Termination::Converged);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].step, 0u);
  EXPECT_EQ(t.snapshots.size(), 1u);
}

TEST(Run, FixedTimeClock) {
  SchemeConfig c;
  c.tau = 1.0 / 128.0;
  c.stopping = {StopRule::FixedTime, 0.5};
  const auto t = run(c, Domain::disc(Point(0.0, 0.0), 1.0), Potential::inverse_quadratic(1.0, 1.0),
                     state_of({Point(0.1, 0.0), Point(0.0, 0.2), Point(-0.3, -0.1)}));
  EXPECT_EQ(t.termination, Termination::FixedTimeReached);
  EXPECT_NEAR(t.rows.back().time, 0.5, 1e-12);
  EXPECT_EQ(t.rows.back().step, 64u);
  for (std::size_t k = 1; k < t.rows.size(); ++k) EXPECT_GT(t.rows[k].time, t.rows[k - 1].time);
  EXPECT_EQ(t.snapshots.back().time, t.rows.back().time);
}

TEST(Run, PaperIntervalScenarioConverges) {
  const Domain paper = Domain::interval_union({{-1.0, 1.0}, {1.5, 1.5}});
  const auto init = sample_initial(UniformBox{Point(-1.75), Point(1.75), 100}, paper, 7);
  SchemeConfig c = epsilon_config(0.1);
  c.tol = 1e-9;
  const auto t = run(c, paper, Potential::quadratic(), init);
  ASSERT_EQ(t.termination, Termination::Converged);
  EXPECT_TRUE(energy_nonincreasing(t));
  for (const Point& x : t.final_state.positions) {
    EXPECT_GE(x[0], -1.1);
    EXPECT_LE(x[0], 1.6);
  }
}

TEST(Run, ProjectedSchemeStaysOnDomain) {
  const Domain circle = sample_circle(1024);
  SchemeConfig c;
  c.stopping = {StopRule::FixedTime, 1.0};
  const auto t = run(c, circle, Potential::inverse_quadratic(1.0, 1.0), circle_state(circle, 20, 1));
  ASSERT_EQ(t.termination, Termination::FixedTimeReached);
  for (const TraceRow& r : t.rows) EXPECT_LE(r.mean_sq_dist, 1e-18);
}

TEST(Run, EpsilonEnergyNonincreasingOnCircle) {
  const Domain circle = sample_circle(1024);
  std::vector<Point> ring;
  for (int k = 0; k < 24; ++k) ring.emplace_back(1.3 * std::cos(0.1 + k * M_PI / 12), 1.3 * std::sin(0.1 + k * M_PI / 12));
  SchemeConfig c = epsilon_config(0.05);
  c.tol = 1e-9;
  const auto t = run(c, circle, Potential::quadratic(), state_of(ring));
  EXPECT_EQ(t.termination, Termination::Converged) << t.failure;
  EXPECT_TRUE(energy_nonincreasing(t));
}

TEST(Run, DeterministicAcrossWorkerCounts) {
  const Domain bean = sample_bean_region(1024);
  const GridSpec g{Point(-0.95, -0.42), Point(0.95, 0.42), {10, 10}, 0.03};
  const auto init = sample_initial(ProjectedPerturbedGrid{g}, bean, 11);
  SchemeConfig c;
  c.stopping = {StopRule::FixedTime, 0.2};
  c.snapshot_every = 5;
  c.workers = 1;
  const auto one = trace_csv(run(c, bean, Potential::inverse_quadratic(1.0, 1.0), init));
  c.workers = 4;
  const auto four = trace_csv(run(c, bean, Potential::inverse_quadratic(1.0, 1.0), init));
  EXPECT_EQ(one, four);
  c.workers = 1;
  EXPECT_EQ(one, trace_csv(run(c, bean, Potential::inverse_quadratic(1.0, 1.0), init)));
}

// One projected step against a fine reference of tau/2^7 sub-steps.
TEST(Run, LocalErrorWithinBound) {
  const Domain circle = sample_circle(4096);
  const Potential W = Potential::quadratic();
  const double tau = max_stable_tau(circle, W, 1.0);
  const double R = interaction_radius(circle, 1.0);
  const auto init = circle_state(circle, 30, 4);
  const auto coarse = projected_step(init, W, circle, tau);
  ParticleState fine = init;
  for (int k = 0; k < 128; ++k) fine = projected_step(fine, W, circle, tau / 128.0);
  const double err = w2_assignment(coarse.positions, fine.positions);
  const double bound =
      2.0 * W.hessian_bound(R) * W.grad_bound(R) * tau * tau * std::exp(6.0 * W.grad_bound(R) * tau / reach(circle));
  EXPECT_GT(err, 0.0);
  EXPECT_LE(err, bound);
}

TEST(Run, ConfigValidation) {
  const Domain disc = Domain::disc(Point(0.0, 0.0), 1.0);
  const auto s = state_of({Point(0.0, 0.0)});
  auto expect_code = [&](SchemeConfig c, const Domain& d, const ParticleState& init, Errc code) {
    try {
      run(c, d, Potential::quadratic(), init);
      ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code);
    }
  };
  SchemeConfig bad_eps = epsilon_config(0.0);
  expect_code(bad_eps, disc, s, Errc::InvalidConfig);
  SchemeConfig bad_tau;
  bad_tau.tau = -1.0;
  expect_code(bad_tau, disc, s, Errc::InvalidConfig);
  SchemeConfig bad_t;
  bad_t.stopping = {StopRule::FixedTime, 0.0};
  expect_code(bad_t, disc, s, Errc::InvalidConfig);
  SchemeConfig ok;
  expect_code(ok, disc, state_of({Point(2.0, 0.0)}), Errc::NotOnDomain);
  const Domain circle = sample_circle(256);
  SchemeConfig big;
  big.tau = 0.5;
  expect_code(big, circle, state_of({Point(1.0, 0.0)}), Errc::InvalidConfig);
  expect_code(ok, disc, state_of({Point(0.0)}), Errc::DimensionMismatch);
}

TEST(Run, BlowUpEndsAsFailed) {
  SchemeConfig c = epsilon_config(0.01);
  c.tau = 10.0;
  c.max_steps = 10000;
  const auto t = run(c, unit_interval(), Potential::quadratic(), state_of({Point(2.0), Point(-3.0)}));
  EXPECT_EQ(t.termination, Termination::Failed);
  EXPECT_NE(t.failure.find("NonFiniteState"), std::string::npos);
  EXPECT_FALSE(t.snapshots.empty());
}

TEST(Run, MaxStepsReported) {
  SchemeConfig c = epsilon_config(0.1);
  c.max_steps = 3;
  c.tol = 1e-15;
  const auto t = run(c, unit_interval(), Potential::quadratic(), state_of({Point(2.0), Point(-3.0)}));
  EXPECT_EQ(t.termination, Termination::MaxSteps);
  EXPECT_EQ(t.rows.size(), 4u);
}

TEST(Samplers, UniformBoxDeterministic) {
  const Domain paper = Domain::interval_union({{-1.0, 1.0}, {1.5, 1.5}});
  const auto a = sample_initial(UniformBox{Point(-1.75), Point(1.75), 100}, paper, 42);
  const auto b = sample_initial(UniformBox{Point(-1.75), Point(1.75), 100}, paper, 42);
  const auto c = sample_initial(UniformBox{Point(-1.75), Point(1.75), 100}, paper, 43);
  ASSERT_EQ(a.size(), 100u);
  EXPECT_EQ(a.positions, b.positions);
  EXPECT_NE(a.positions, c.positions);
  for (const Point& p : a.positions) {
    EXPECT_GE(p[0], -1.75);
    EXPECT_LT(p[0], 1.75);
  }
}

TEST(Samplers, PerturbedGridWithoutJitter) {
  const Domain disc = Domain::disc(Point(0.0, 0.0), 1.0);
  const GridSpec g{Point(-0.7, -0.7), Point(0.7, 0.7), {14, 14}, 0.0};
  const auto s = sample_initial(PerturbedGrid{g}, disc, 1);
  EXPECT_EQ(s.size(), 196u);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double x = -0.7 + (double(k % 14) + 0.5) * 0.1;
    const double y = -0.7 + (double(k / 14) + 0.5) * 0.1;
    EXPECT_NEAR(s.positions[k][0], x, 1e-15);
    EXPECT_NEAR(s.positions[k][1], y, 1e-15);
  }
  const GridSpec wide{Point(-1.4, -1.4), Point(1.4, 1.4), {14, 14}, 0.0};
  const auto t = sample_initial(PerturbedGrid{wide}, disc, 1);
  EXPECT_LT(t.size(), 196u);
  for (const Point& p : t.positions) EXPECT_TRUE(on_domain(disc, p));
}

TEST(Samplers, ProjectedGridOnBeanBoundary) {
  const Domain bean = sample_bean_boundary(4096);
  const GridSpec g{Point(-0.95, -0.42), Point(0.95, 0.42), {14, 14}, 0.03};
  const auto s = sample_initial(ProjectedPerturbedGrid{g}, bean, 13);
  EXPECT_EQ(s.size(), 196u);
  for (const Point& p : s.positions) EXPECT_LE(distance(bean, p), 1e-9);
}

TEST(Samplers, EmptySample) {
  const Domain disc = Domain::disc(Point(0.0, 0.0), 1.0);
  const GridSpec g{Point(3.0, 3.0), Point(4.0, 4.0), {4, 4}, 0.0};
  try {
    sample_initial(PerturbedGrid{g}, disc, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptySample);
  }
  EXPECT_THROW(sample_initial(UniformBox{Point(0.0, 0.0), Point(1.0, 1.0), 0}, disc, 1), Error);
}

}  // namespace
