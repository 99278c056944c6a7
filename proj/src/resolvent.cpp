#include "finspec/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace finspec {

namespace {

using cd = std::complex<double>;

std::vector<cd> solve_tridiagonal(const TruncatedOperator& T, cd z, const std::vector<cd>& x) {
    const std::size_t n = T.dim;
    std::vector<cd> diag(n), rhs = x;
    std::vector<cd> upper(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = cd(T.at(i, i), 0.0) - z;
        if (i + 1 < n) upper[i] = T.at(i, i + 1);
    }
    // Forward elimination; symmetric matrix, so lower(i) == upper(i).
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cd m = upper[i] / diag[i];
        diag[i + 1] -= m * upper[i];
        rhs[i + 1] -= m * rhs[i];
    }
    std::vector<cd> y(n);
    y[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        y[i] = (rhs[i] - upper[i] * y[i + 1]) / diag[i];
    }
    return y;
}

std::vector<cd> solve_dense(const TruncatedOperator& T, cd z, const std::vector<cd>& x) {
    const std::size_t n = T.dim;
    std::vector<cd> a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] = cd(T.at(i, j), 0.0) - (i == j ? z : cd(0.0));
        }
    }
    std::vector<cd> rhs = x;
    // LU with partial pivoting, pivoting the right-hand side along.
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = std::abs(a[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) {
            throw NumericalError("resolvent_solve: zero pivot at column " + std::to_string(col) +
                                 " (must not occur for nonreal shifts)");
        }
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
            std::swap(rhs[col], rhs[piv]);
        }
        const cd pivot = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            cd m = a[r * n + col] / pivot;
            if (m == cd(0.0)) continue;
            a[r * n + col] = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) a[r * n + j] -= m * a[col * n + j];
            rhs[r] -= m * rhs[col];
        }
    }
    std::vector<cd> y(n);
    for (std::size_t i = n; i-- > 0;) {
        cd s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * y[j];
        y[i] = s / a[i * n + i];
    }
    return y;
}

}  // namespace

std::vector<cd> resolvent_solve(const TruncatedOperator& T, cd z, const std::vector<cd>& x) {
    if (x.size() != T.dim) throw ConfigError("resolvent_solve: vector length does not match dimension");
    if (!(std::fabs(z.imag()) > 0.0)) {
        throw ConfigError("resolvent_solve: shift must have nonzero imaginary part");
    }
    if (T.banded_hint && *T.banded_hint <= 1) return solve_tridiagonal(T, z, x);
    return solve_dense(T, z, x);
}

std::vector<cd> resolvent_solve(const TruncatedOperator& T, cd z, const std::vector<double>& x) {
    std::vector<cd> xc(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xc[i] = x[i];
    return resolvent_solve(T, z, xc);
}

double operational_calculus_residual(const SpectralFamily& fam, const TruncatedOperator& T,
                                     cd z, const std::vector<double>& x) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<cd> via_measure = fam.stieltjes_apply_complex(
        [z](double lambda) { return 1.0 / (cd(lambda, 0.0) - z); }, -inf, inf, x);
    std::vector<cd> via_solve = resolvent_solve(T, z, x);
    double s = 0.0;
    for (std::size_t i = 0; i < via_measure.size(); ++i) s += std::norm(via_measure[i] - via_solve[i]);
    return std::sqrt(s);
}

namespace {

constexpr std::size_t kPanelCap = std::size_t(1) << 20;

// Integrand of the spectral-increment reconstruction at shift height eps:
// for real symmetric T and real x, (1/2 pi i)[R(mu+i eps) - R(mu-i eps)]x
// collapses to Im(R(mu+i eps) x) / pi.
std::vector<double> stone_integrand(const TruncatedOperator& T, double mu, double eps,
                                    const std::vector<double>& x) {
    std::vector<cd> y = resolvent_solve(T, cd(mu, eps), x);
    std::vector<double> f(y.size());
    constexpr double inv_pi = 0.3183098861837906715;
    for (std::size_t i = 0; i < y.size(); ++i) f[i] = y[i].imag() * inv_pi;
    return f;
}

std::vector<double> simpson_pass(const TruncatedOperator& T, double a, double b, double eps,
                                 const std::vector<double>& x, std::size_t panels) {
    const std::size_t n = T.dim;
    const double h = (b - a) / static_cast<double>(panels);
    std::vector<double> acc(n, 0.0);
    std::vector<double> left = stone_integrand(T, a, eps, x);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double hi = (p + 1 == panels) ? b : a + h * static_cast<double>(p + 1);
        std::vector<double> mid = stone_integrand(T, 0.5 * (lo + hi), eps, x);
        std::vector<double> right = stone_integrand(T, hi, eps, x);
        const double w = (hi - lo) / 6.0;
        for (std::size_t i = 0; i < n; ++i) acc[i] += w * (left[i] + 4.0 * mid[i] + right[i]);
        left = std::move(right);
    }
    return acc;
}

}  // namespace

StoneReconstruction stone_reconstruct(const TruncatedOperator& T, double a, double b,
                                      double epsilon, const std::vector<double>& x,
                                      double refinement_tol, const EigenDecomposition* spectrum) {
    if (x.size() != T.dim) throw ConfigError("stone_reconstruct: vector length does not match dimension");
    if (!(a < b)) throw ConfigError("stone_reconstruct: interval must satisfy a < b");
    if (!(epsilon > 0.0)) throw ConfigError("stone_reconstruct: epsilon must be > 0");
    if (!(refinement_tol > 0.0)) throw ConfigError("stone_reconstruct: refinement tolerance must be > 0");

    EigenDecomposition local;
    if (!spectrum) {
        local = eigendecompose(T);
        spectrum = &local;
    }
    double dist = std::numeric_limits<double>::infinity();
    for (double ev : spectrum->eigenvalues) {
        dist = std::min(dist, std::min(std::fabs(a - ev), std::fabs(b - ev)));
    }

    // The integrand varies on the scale of epsilon near the spectrum.
    const double initial_width = std::min(epsilon / 4.0, (b - a) / 16.0);
    std::size_t panels = static_cast<std::size_t>(std::ceil((b - a) / initial_width));
    panels = std::max<std::size_t>(panels, 1);
    if (panels > kPanelCap) {
        throw NumericalError("stone_reconstruct: initial panel count exceeds cap");
    }

    std::vector<double> prev = simpson_pass(T, a, b, epsilon, x, panels);
    for (;;) {
        if (panels * 2 > kPanelCap) {
            throw NumericalError("stone_reconstruct: refinement cap of 2^20 panels exceeded");
        }
        panels *= 2;
        std::vector<double> cur = simpson_pass(T, a, b, epsilon, x, panels);
        double diff = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            double d = cur[i] - prev[i];
            diff += d * d;
        }
        prev = std::move(cur);
        if (std::sqrt(diff) < refinement_tol) break;
    }

    StoneReconstruction rec;
    rec.a = a;
    rec.b = b;
    rec.epsilon = epsilon;
    rec.quadrature_panels = panels;
    rec.result = std::move(prev);
    rec.endpoint_distance = dist;
    return rec;
}

StoneLimitStudy stone_limit_study(const TruncatedOperator& T, double a, double b,
                                  const std::vector<double>& x,
                                  const std::vector<double>& epsilons, double eta,
                                  double refinement_tol) {
    if (epsilons.empty()) throw ConfigError("stone_limit_study: epsilon list is empty");
    for (std::size_t i = 0; i + 1 < epsilons.size(); ++i) {
        if (!(epsilons[i] > epsilons[i + 1])) {
            throw ConfigError("stone_limit_study: epsilons must be strictly descending");
        }
    }
    if (!(epsilons.back() > 0.0)) throw ConfigError("stone_limit_study: epsilons must be positive");
    if (!(eta > 0.0)) throw ConfigError("stone_limit_study: eta must be > 0");

    auto op = std::make_shared<TruncatedOperator>(T);
    SpectralFamily fam = SpectralFamily::build(op);
    const EigenDecomposition& dec = fam.decomposition();

    double dist = std::numeric_limits<double>::infinity();
    for (double ev : dec.eigenvalues) {
        dist = std::min(dist, std::min(std::fabs(a - ev), std::fabs(b - ev)));
    }
    if (dist < eta) {
        throw ConfigError("stone_limit_study: endpoint within " + std::to_string(dist) +
                          " of an eigenvalue, below the continuity guard eta=" + std::to_string(eta));
    }

    std::vector<double> fa = fam.apply_F(a, x);
    std::vector<double> fb = fam.apply_F(b, x);
    std::vector<double> increment(fa.size());
    for (std::size_t i = 0; i < fa.size(); ++i) increment[i] = fb[i] - fa[i];

    StoneLimitStudy study;
    study.endpoint_distance = dist;
    study.eta = eta;
    double prev_err = std::numeric_limits<double>::quiet_NaN();
    for (double eps : epsilons) {
        StoneReconstruction rec = stone_reconstruct(T, a, b, eps, x, refinement_tol, &dec);
        double err = 0.0;
        for (std::size_t i = 0; i < increment.size(); ++i) {
            double d = rec.result[i] - increment[i];
            err += d * d;
        }
        err = std::sqrt(err);
        StoneLimitRow row;
        row.epsilon = eps;
        row.error = err;
        row.ratio = err / prev_err;  // NaN on the first row
        study.rows.push_back(row);
        prev_err = err;
    }
    return study;
}

}  // namespace finspec
