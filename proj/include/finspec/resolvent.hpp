#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "finspec/eigensolver.hpp"
#include "finspec/operators.hpp"
#include "finspec/spectral_family.hpp"

namespace finspec {

// Solves (T - z) y = x for nonreal z. Uses an unpivoted complex tridiagonal
// elimination when banded_hint permits: the pivot's imaginary part keeps the
// sign of -Im z and magnitude >= |Im z| throughout, so no pivot can vanish.
// Dense input falls back to complex LU with partial pivoting. Real z is
// rejected; a vanishing pivot signals a bug, not an input condition.
std::vector<std::complex<double>> resolvent_solve(const TruncatedOperator& T,
                                                  std::complex<double> z,
                                                  const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> resolvent_solve(const TruncatedOperator& T,
                                                  std::complex<double> z,
                                                  const std::vector<double>& x);

// || integral of 1/(lambda - z) dF(lambda) x  -  (T - z)^{-1} x ||.
double operational_calculus_residual(const SpectralFamily& fam, const TruncatedOperator& T,
                                     std::complex<double> z, const std::vector<double>& x);

struct StoneReconstruction {
    double a = 0.0;
    double b = 0.0;
    double epsilon = 0.0;
    std::size_t quadrature_panels = 0;
    std::vector<double> result;
    double endpoint_distance = 0.0;  // min distance from {a, b} to the spectrum
};

// (1/2 pi i) * integral over (a, b) of [R(mu + i eps) - R(mu - i eps)] x dmu,
// which for real symmetric T and real x equals Im(R(mu + i eps) x) / pi.
// Composite per-panel Simpson quadrature; the panel count doubles until two
// successive results differ by less than refinement_tol (cap 2^20 panels).
// Pass the spectrum when already available to avoid an internal
// eigendecomposition for the endpoint-distance diagnostic.
StoneReconstruction stone_reconstruct(const TruncatedOperator& T, double a, double b,
                                      double epsilon, const std::vector<double>& x,
                                      double refinement_tol,
                                      const EigenDecomposition* spectrum = nullptr);

struct StoneLimitRow {
    double epsilon = 0.0;
    double error = 0.0;  // || reconstruction - (F(b) - F(a)) x ||
    double ratio = 0.0;  // error / previous error; NaN on the first row
};

struct StoneLimitStudy {
    std::vector<StoneLimitRow> rows;
    double endpoint_distance = 0.0;
    double eta = 0.0;
};

// Sweeps descending epsilons against the exact spectral increment.
// Both endpoints must be at distance >= eta from every eigenvalue.
StoneLimitStudy stone_limit_study(const TruncatedOperator& T, double a, double b,
                                  const std::vector<double>& x,
                                  const std::vector<double>& epsilons, double eta,
                                  double refinement_tol);

}  // namespace finspec
