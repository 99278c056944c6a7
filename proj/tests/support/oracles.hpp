#pragma once

#include <cstddef>
#include <vector>

// Slow reference implementations used only by tests. Each is derived by a
// different route than the library code it cross-checks.
namespace oracles {

// Eigenvalues of a small symmetric matrix by bisection on the characteristic
// polynomial sign, det(A - t I) evaluated via Gaussian elimination. O(n^4) per
// bisection; intended for n <= 8.
std::vector<double> charpoly_eigenvalues(const std::vector<double>& entries, std::size_t n,
                                         double tol = 1e-12);

// erf via its Maclaurin series, summed to machine precision for |t| <= 6.
double erf_series(double t);

// Standard normal CDF built on erf_series.
double normal_cdf(double t, double mean, double variance);

// Semicircle CDF on [-2, 2] by adaptive Simpson integration of the density
// (1/2pi) sqrt(4 - t^2); no closed form used.
double semicircle_cdf_numeric(double lambda);

}  // namespace oracles
