#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "finspec/eigensolver.hpp"
#include "finspec/operators.hpp"

namespace finspec {

// Scalar spectral measure of a fixed vector: lambda -> (F(lambda)x, x),
// a nondecreasing right-continuous step function with one jump per cluster
// (zero-mass jumps retained).
struct SpectralCDF {
    std::vector<double> jump_locations;  // ascending cluster representatives
    std::vector<double> jump_masses;     // squared cluster projections of x
    double total = 0.0;                  // ||x||^2

    double evaluate(double lambda) const;
};

struct TailReport {
    double lhs = 0.0;            // ||T x||^2
    double left_moment = 0.0;    // |integral of lambda over (-inf, -K]|
    double right_moment = 0.0;   // |integral of lambda over (K, inf)|
    double slack = 0.0;          // roundoff allowance used in the comparison
    bool bound_satisfied = false;

    double tail_first_moment() const { return left_moment + right_moment; }
};

// Projection-valued step function F(lambda) = sum of eigenprojections with
// eigenvalue <= lambda, together with every Stieltjes integral against it.
// Interval arguments are half-open (a, b]; +-infinity is accepted.
// Boundary ties are resolved at cluster granularity: once lambda reaches any
// member of a cluster, the whole cluster is included.
class SpectralFamily {
public:
    // cluster_tol < 0 selects the default 100 * N * ulp(spectral radius).
    static SpectralFamily build(std::shared_ptr<const TruncatedOperator> T,
                                double cluster_tol = -1.0, double eig_tol = 0.0);

    std::size_t dim() const { return dec_.dim; }
    const TruncatedOperator& op() const { return *op_; }
    const std::shared_ptr<const TruncatedOperator>& op_handle() const { return op_; }
    const EigenDecomposition& decomposition() const { return dec_; }
    const std::vector<Cluster>& clusters() const { return clusters_; }

    // Number of leading eigenvalue indices included at level lambda.
    // Always a cluster boundary.
    std::size_t included_count(double lambda) const;

    // Eigenbasis coefficients c_k = v_k . x.
    std::vector<double> coefficients(const std::vector<double>& x) const;

    // Mass-weighted mean of the cluster's eigenvalues under the coefficient
    // weights; unweighted mean when the cluster carries no mass.
    double cluster_representative(const Cluster& c, const std::vector<double>& coeff) const;

    std::vector<double> apply_F(double lambda, const std::vector<double>& x) const;

    SpectralCDF cdf(const std::vector<double>& x) const;

    std::vector<double> stieltjes_apply(const std::function<double(double)>& g,
                                        double a, double b, const std::vector<double>& x) const;
    std::vector<std::complex<double>> stieltjes_apply_complex(
        const std::function<std::complex<double>(double)>& g, double a, double b,
        const std::vector<double>& x) const;

    // sum_k a_k (F(a_k) - F(a_{k-1})) x over a strictly increasing partition
    // a_0 < ... < a_n, tags at right endpoints.
    std::vector<double> riemann_stieltjes_sum(const std::vector<double>& x,
                                              const std::vector<double>& partition) const;

    // integral of lambda d(F(lambda)x, y) over (a, b] via the four-term
    // polarization combination of vector-diagonal measures.
    std::complex<double> polarization_measure(const std::vector<double>& x,
                                              const std::vector<double>& y,
                                              double a, double b) const;

    // Certificate for ||Tx||^2 >= K * |one-sided tail first moment|, K > 0.
    // A false bound_satisfied signals an implementation bug, not a property
    // of the data.
    TailReport tail_report(const std::vector<double>& x, double K) const;

private:
    std::shared_ptr<const TruncatedOperator> op_;
    EigenDecomposition dec_;
    std::vector<Cluster> clusters_;
    std::vector<std::size_t> cluster_end_of_;  // raw index -> end of its cluster
    std::vector<std::size_t> cluster_of_;      // raw index -> cluster index

    void check_dim(const std::vector<double>& x) const;
    std::vector<double> weighted_reconstruct(const std::vector<double>& cw) const;
    // integral of lambda over (a, b] against the diagonal measure of complex
    // coefficients, clusters evaluated at their own weighted representatives.
    double diag_first_moment(const std::vector<std::complex<double>>& coeff,
                             double a, double b) const;
};

}  // namespace finspec
