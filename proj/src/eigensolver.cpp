#include "finspec/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace finspec {

double EigenDecomposition::spectral_radius() const {
    if (eigenvalues.empty()) return 0.0;
    return std::max(std::fabs(eigenvalues.front()), std::fabs(eigenvalues.back()));
}

namespace {

constexpr int kMaxSweeps = 50;

// Householder reduction of the row-major symmetric matrix a (overwritten with
// the accumulated orthogonal factor). d receives the diagonal, e the
// subdiagonal shifted so that e[i] couples d[i] and d[i+1], e[n-1] = 0.
void householder_tridiag(std::vector<double>& a, std::size_t n,
                         std::vector<double>& d, std::vector<double>& e) {
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

    for (std::size_t i = n - 1; i >= 1; --i) {
        std::size_t l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(A(i, k));
            if (scale == 0.0) {
                e[i] = A(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                A(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    A(j, i) = A(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
                    e[j] = g / h;
                    f += e[j] * A(i, j);
                }
                double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = A(i, j);
                    double gj = e[j] - hh * f;
                    e[j] = gj;
                    for (std::size_t k = 0; k <= j; ++k) A(j, k) -= f * e[k] + gj * A(i, k);
                }
            }
        } else {
            e[i] = A(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += A(i, k) * A(k, j);
                for (std::size_t k = 0; k < i; ++k) A(k, j) -= g * A(k, i);
            }
        }
        d[i] = A(i, i);
        A(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) A(j, i) = A(i, j) = 0.0;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = e[i + 1];
    e[n - 1] = 0.0;
}

// Implicitly shifted QL with Wilkinson shifts on (d, e); z holds the
// column-major orthogonal accumulator and receives the eigenvectors.
// e[l] couples d[l] and d[l+1]. Deflation: |e[l]| <= tol * (|d[l]| + |d[l+1]|).
void ql_implicit(std::vector<double>& d, std::vector<double>& e,
                 std::vector<double>& z, std::size_t n, double tol) {
    auto column = [&](std::size_t j) { return z.data() + j * n; };

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= tol * dd) break;
            }
            if (m != l) {
                if (iter++ == kMaxSweeps) {
                    throw NumericalError("eigendecompose: off-diagonal element " + std::to_string(l) +
                                         " failed to deflate within " + std::to_string(kMaxSweeps) +
                                         " sweeps");
                }
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t ip1 = m; ip1-- > l;) {
                    // ip1 runs m-1 down to l; rotation acts on rows ip1, ip1+1.
                    std::size_t i = ip1;
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    double* zi = column(i);
                    double* zi1 = column(i + 1);
                    for (std::size_t k = 0; k < n; ++k) {
                        double fk = zi1[k];
                        zi1[k] = s * zi[k] + c * fk;
                        zi[k] = c * zi[k] - s * fk;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

EigenDecomposition eigendecompose(const TruncatedOperator& T, double tol) {
    const std::size_t n = T.dim;
    if (n == 0) throw ConfigError("eigendecompose: empty operator");
    if (tol < 0.0) throw ConfigError("eigendecompose: tol must be >= 0");
    if (tol == 0.0) tol = std::numeric_limits<double>::epsilon();

    std::vector<double> d(n, 0.0), e(n, 0.0);
    std::vector<double> z(n * n, 0.0);  // column-major

    const bool tridiag = T.banded_hint && *T.banded_hint <= 1;
    if (tridiag) {
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = T.at(i, i);
            if (i + 1 < n) e[i] = T.at(i, i + 1);
            z[i * n + i] = 1.0;
        }
    } else {
        std::vector<double> a = T.entries;
        if (n == 1) {
            d[0] = a[0];
        } else {
            householder_tridiag(a, n, d, e);
        }
        // a now holds Q row-major; transpose into the column-major accumulator.
        if (n == 1) {
            z[0] = 1.0;
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) z[j * n + i] = a[i * n + j];
            }
        }
    }

    if (n > 1) ql_implicit(d, e, z, n, tol);

    // Stable ascending sort keeps tied eigenvalues in QL output order,
    // so identical input reproduces identical column order.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a_, std::size_t b_) { return d[a_] < d[b_]; });

    EigenDecomposition out;
    out.dim = n;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = d[perm[k]];
        const double* src = z.data() + perm[k] * n;
        double* dst = out.eigenvectors.data() + k * n;
        double sign = 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (src[r] != 0.0) {
                sign = (src[r] > 0.0) ? 1.0 : -1.0;
                break;
            }
        }
        for (std::size_t r = 0; r < n; ++r) dst[r] = sign * src[r];
    }

    double worst = 0.0;
    std::vector<double> v(n), tv;
    for (std::size_t k = 0; k < n; ++k) {
        std::copy(out.vec(k), out.vec(k) + n, v.begin());
        tv = T.matvec(v);
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double diff = tv[r] - out.eigenvalues[k] * v[r];
            s += diff * diff;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    out.residual_bound = worst;
    return out;
}

std::vector<Cluster> cluster_eigenvalues(const EigenDecomposition& d, double tau) {
    if (tau < 0.0) throw ConfigError("cluster_eigenvalues: tau must be >= 0");
    std::vector<Cluster> clusters;
    const std::size_t n = d.eigenvalues.size();
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == n || d.eigenvalues[i] - d.eigenvalues[i - 1] > tau) {
            clusters.push_back({begin, i});
            begin = i;
        }
    }
    return clusters;
}

double default_cluster_tolerance(const EigenDecomposition& d) {
    return 100.0 * static_cast<double>(d.dim) * ulp(d.spectral_radius());
}

}  // namespace finspec
