#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cflow/wasserstein.hpp"

namespace {

using namespace cflow;

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Point> p;
  for (std::size_t i = 0; i < n; ++i) {
    if (dim == 1) {
      p.emplace_back(g(rng));
    } else {
      const double x = g(rng);
      p.emplace_back(x, g(rng));
    }
  }
  return p;
}

// Independent oracle: minimum over all permutations, written without the
// library's enumeration helper.
double oracle_w2(const std::vector<Point>& a, const std::vector<Point>& b) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) c += norm_sq(a[i] - b[perm[i]]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best / double(a.size()));
}

TEST(W2OneD, Examples) {
  const std::vector<Point> a{Point(0.0), Point(2.0)}, b{Point(1.0), Point(1.0)};
  EXPECT_EQ(w2_1d(a, a), 0.0);
  EXPECT_DOUBLE_EQ(w2_1d(a, b), 1.0);
  EXPECT_DOUBLE_EQ(w2_1d(std::vector<Point>{Point(0.0)}, std::vector<Point>{Point(3.0)}), 3.0);
}

TEST(W2OneD, Errors) {
  const std::vector<Point> a{Point(0.0), Point(2.0)}, b{Point(1.0)};
  try {
    w2_1d(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SizeMismatch);
  }
  EXPECT_THROW(w2_1d(std::vector<Point>{Point(0.0, 0.0)}, std::vector<Point>{Point(1.0, 0.0)}), Error);
  EXPECT_THROW(w2_1d(std::vector<Point>{}, std::vector<Point>{}), Error);
}

TEST(W2Assignment, Examples) {
  const std::vector<Point> a{Point(0.0, 0.0), Point(1.0, 0.0)}, b{Point(1.0, 0.0), Point(0.0, 0.0)};
  EXPECT_EQ(w2_assignment(a, b), 0.0);
  std::mt19937_64 rng(1);
  const auto c = random_points(rng, 40, 2);
  EXPECT_EQ(w2_assignment(c, c), 0.0);
  EXPECT_THROW(w2_assignment(a, std::vector<Point>{Point(0.0, 0.0)}), Error);
}

TEST(W2Assignment, MatchesPermutationOracle) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + std::size_t(k % 6);
    const int dim = 1 + (k / 6) % 2;
    const auto a = random_points(rng, n, dim), b = random_points(rng, n, dim);
    ASSERT_NEAR(w2_assignment(a, b), oracle_w2(a, b), 1e-12);
  }
}

TEST(W2Bruteforce, Examples) {
  EXPECT_DOUBLE_EQ(w2_bruteforce(std::vector<Point>{Point(1.0, 2.0)}, std::vector<Point>{Point(4.0, 6.0)}), 5.0);
  EXPECT_DOUBLE_EQ(w2_bruteforce(std::vector<Point>{Point(0.0), Point(2.0)}, std::vector<Point>{Point(1.0), Point(1.0)}),
                   1.0);
  const double h = 0.3;
  const std::vector<Point> a{Point(0.0), Point(1.0), Point(2.0)}, b{Point(h), Point(1.0 + h), Point(2.0 + h)};
  EXPECT_NEAR(w2_bruteforce(a, b), h, 1e-15);
}

TEST(W2Bruteforce, SizeLimit) {
  std::mt19937_64 rng(3);
  const auto a = random_points(rng, 9, 1);
  try {
    w2_bruteforce(a, a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SizeTooLarge);
  }
}

TEST(W2Properties, MetricAxioms) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + std::size_t(k % 20);
    const auto a = random_points(rng, n, 2), b = random_points(rng, n, 2), c = random_points(rng, n, 2);
    const double ab = w2_assignment(a, b), ba = w2_assignment(b, a);
    EXPECT_EQ(ab, ba);
    EXPECT_LE(ab, w2_assignment(a, c) + w2_assignment(c, b) + 1e-10);
    EXPECT_GT(ab, 1e-12);
    auto shuffled = a;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_LE(w2_assignment(a, shuffled), 1e-12);
  }
}

TEST(W2Properties, OneDimensionalConsistency) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + std::size_t(k % 30);
    const auto a = random_points(rng, n, 1), b = random_points(rng, n, 1);
    ASSERT_NEAR(w2_1d(a, b), w2_assignment(a, b), 1e-12);
  }
}

TEST(W2Properties, TranslationAndScaling) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 50; ++k) {
    const auto a = random_points(rng, 15, 2), b = random_points(rng, 15, 2);
    const Point v(0.5 * (k % 3), -0.25 * (k % 5));
    auto shifted = a;
    for (Point& p : shifted) p += v;
    EXPECT_NEAR(w2_assignment(a, shifted), norm(v), 1e-12);
    const double lambda = 0.5 + 0.37 * k;
    auto sa = a, sb = b;
    for (Point& p : sa) p *= lambda;
    for (Point& p : sb) p *= lambda;
    EXPECT_NEAR(w2_assignment(sa, sb), lambda * w2_assignment(a, b), 1e-12 * std::max(1.0, lambda));
  }
}

TEST(SolveAssignment, OptimalOnKnownMatrix) {
  const std::vector<double> cost{4, 1, 3, 2, 0, 5, 3, 2, 2};
  const auto assign = solve_assignment(cost, 3);
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) total += cost[i * 3 + assign[i]];
  EXPECT_EQ(total, 5.0);
}

}  // namespace
