#include "cflow/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cflow/error.hpp"

namespace cflow {

namespace {

void check_sizes(std::span<const Point> a, std::span<const Point> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::SizeMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " points");
  }
  if (a.empty()) throw Error(Errc::InvalidArgument, "empirical measures need N >= 1");
  const int dim = a.front().dim;
  for (const Point& p : a) require_dim(p, dim);
  for (const Point& p : b) require_dim(p, dim);
}

// Mean squared cost of a permutation, summed in row order.
// Pair costs are summed in ascending order so that swapping the two
// measures gives a bitwise identical result.
double mean_cost(std::span<const Point> a, std::span<const Point> b, const std::vector<std::size_t>& perm) {
  std::vector<double> pair(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pair[i] = norm_sq(a[i] - b[perm[i]]);
  std::sort(pair.begin(), pair.end());
  double sum = 0.0;
  for (double c : pair) sum += c;
  return sum / double(a.size());
}

}  // namespace

double w2_1d(std::span<const Point> a, std::span<const Point> b) {
  check_sizes(a, b);
  require_dim(a.front(), 1);
  std::vector<double> xa, xb;
  for (const Point& p : a) xa.push_back(p[0]);
  for (const Point& p : b) xb.push_back(p[0]);
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) sum += (xa[i] - xb[i]) * (xa[i] - xb[i]);
  return std::sqrt(sum / double(xa.size()));
}

std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw Error(Errc::SizeMismatch, "cost matrix is not n x n");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based rows/columns; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> min_slack(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t r = match[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double slack = cost[(r - 1) * n + (c - 1)] - u[r] - v[c];
        if (slack < min_slack[c]) {
          min_slack[c] = slack;
          way[c] = col0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
  return assignment;
}

double w2_assignment(std::span<const Point> a, std::span<const Point> b) {
  check_sizes(a, b);
  const std::size_t n = a.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = norm_sq(a[i] - b[j]);
  return std::sqrt(mean_cost(a, b, solve_assignment(cost, n)));
}

double w2_bruteforce(std::span<const Point> a, std::span<const Point> b) {
  check_sizes(a, b);
  if (a.size() > 8) throw Error(Errc::SizeTooLarge, "brute force limited to N <= 8");
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, mean_cost(a, b, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best);
}

}  // namespace cflow
