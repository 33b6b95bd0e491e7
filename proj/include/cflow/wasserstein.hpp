#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cflow/point.hpp"

namespace cflow {

/// Quadratic Wasserstein distance between equal-size uniform empirical
/// measures (1/N) sum delta_{a_i} and (1/N) sum delta_{b_i}.

/// Monotone coupling on the line. Throws SizeMismatch / DimensionMismatch.
double w2_1d(std::span<const Point> a, std::span<const Point> b);

/// Exact optimal assignment with cost |a_i - b_j|^2, any dimension.
double w2_assignment(std::span<const Point> a, std::span<const Point> b);

/// Minimum over all N! permutations; N <= 8, otherwise SizeTooLarge.
double w2_bruteforce(std::span<const Point> a, std::span<const Point> b);

/// Minimum-cost perfect matching of a square cost matrix (row-major, n x n).
/// Returns assignment[row] = column. Shortest augmenting path with
/// potentials, O(n^3).
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

}  // namespace cflow
