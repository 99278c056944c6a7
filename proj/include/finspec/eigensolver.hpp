#pragma once

#include <cstddef>
#include <vector>

#include "finspec/operators.hpp"

namespace finspec {

struct EigenDecomposition {
    std::size_t dim = 0;
    std::vector<double> eigenvalues;   // ascending
    std::vector<double> eigenvectors;  // column-major: column k pairs with eigenvalues[k]
    double residual_bound = 0.0;       // max_k ||T v_k - lambda_k v_k||

    const double* vec(std::size_t k) const { return eigenvectors.data() + k * dim; }
    double spectral_radius() const;
};

// Householder reduction to tridiagonal form, then implicitly shifted QL with
// Wilkinson shifts. Already-tridiagonal input (banded_hint <= 1) skips the
// reduction. tol = 0 selects machine-epsilon relative deflation
// |e_i| <= tol * (|d_i| + |d_{i+1}|). Throws NumericalError when an
// off-diagonal element fails to deflate within 50 sweeps.
// Eigenvector sign convention: first nonzero component positive.
EigenDecomposition eigendecompose(const TruncatedOperator& T, double tol = 0.0);

// Contiguous index range [begin, end) of near-degenerate eigenvalues.
struct Cluster {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

// Groups eigenvalues whose adjacent gaps are <= tau; the gap between adjacent
// clusters is therefore > tau and the spread within a cluster is at most
// tau * (size - 1).
std::vector<Cluster> cluster_eigenvalues(const EigenDecomposition& d, double tau);

// Default clustering width: 100 * N * ulp(spectral radius).
double default_cluster_tolerance(const EigenDecomposition& d);

}  // namespace finspec
