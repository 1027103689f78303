#pragma once

// Test-only reference implementations. Nothing here may call the code path
// it is used to check.

#include <functional>
#include <vector>

#include "sfmg/graph.hpp"
#include "sfmg/rng.hpp"

namespace sfmg::oracle {

/// Orbit counts by exhaustive enumeration of every 2-, 3- and 4-subset and
/// template matching over all vertex permutations.
Matrix brute_force_orbits(const Graph& g);

Graph erdos_renyi(int n, double p, Rng& rng);

/// Central finite-difference gradient of f at x.
Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, Vector x,
                                  double h);

/// 1-D earth mover's distance between two normalized histograms as the L1
/// distance of their cumulative sums.
double emd_by_cdf(std::vector<double> a, std::vector<double> b, double bin_width);

Matrix random_orthonormal(int n, int k, Rng& rng);

}  // namespace sfmg::oracle

namespace sfmg::oracle {

/// Endpoint of the canonical-metric Stiefel geodesic from (y, v), obtained by
/// RK4 integration of  Y'' + Y' Y'^T Y + Y ((Y^T Y')^2 + Y'^T Y') = 0  on [0, 1].
Matrix canonical_geodesic_rk4(const Matrix& y, const Matrix& v, int steps);

}  // namespace sfmg::oracle
