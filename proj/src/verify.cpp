#include "finspec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>

#include "finspec/convergence.hpp"
#include "finspec/eigensolver.hpp"
#include "finspec/resolvent.hpp"
#include "finspec/spectral_family.hpp"

namespace finspec {

namespace {

struct CaseSet {
    std::size_t cases = 0;
    std::size_t violations = 0;
    double worst = -std::numeric_limits<double>::infinity();

    void record(double margin) {
        ++cases;
        if (margin > 0.0) ++violations;
        worst = std::max(worst, margin);
    }

    VerifyCheck finish(std::string name) const {
        VerifyCheck c;
        c.name = std::move(name);
        c.cases = cases;
        c.violations = violations;
        c.worst_margin = (cases == 0) ? 0.0 : worst;
        c.pass = violations == 0;
        return c;
    }
};

double max_abs_offdiag_defect(const EigenDecomposition& dec) {
    const std::size_t n = dec.dim;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* vi = dec.vec(i);
        for (std::size_t j = i; j < n; ++j) {
            const double* vj = dec.vec(j);
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += vi[r] * vj[r];
            worst = std::max(worst, std::fabs(s - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

double reconstruction_defect(const EigenDecomposition& dec, const TruncatedOperator& T) {
    const std::size_t n = dec.dim;
    std::vector<double> m(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double* v = dec.vec(k);
        const double lam = dec.eigenvalues[k];
        for (std::size_t r = 0; r < n; ++r) {
            const double w = lam * v[r];
            double* row = m.data() + r * n;
            for (std::size_t c = 0; c < n; ++c) row[c] += w * v[c];
        }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) worst = std::max(worst, std::fabs(m[i] - T.entries[i]));
    return worst;
}

// Partition point pushed off the spectrum so tags land at continuity points.
double nudge_off(double p, const std::vector<double>& ev) {
    auto near = [&](double q) {
        auto it = std::lower_bound(ev.begin(), ev.end(), q);
        for (auto cand : {it, it == ev.begin() ? it : std::prev(it)}) {
            if (cand != ev.end() && std::fabs(q - *cand) <= 4.0 * ulp(std::max(1.0, std::fabs(*cand)))) {
                return true;
            }
        }
        return false;
    };
    for (int i = 0; i < 8 && near(p); ++i) p += 1e-9;
    return p;
}

}  // namespace

VerifyReport run_verify(const OperatorSpec& spec, const DomainProbe& probe,
                        const VerifyOptions& options) {
    if (options.N < 2) throw ConfigError("verify: N must be >= 2");
    if (options.tolerance_scale < 0.0) throw ConfigError("verify: tolerance scale must be >= 0");
    const double scale = options.tolerance_scale;
    const std::size_t N = options.N;
    const double dN = static_cast<double>(N);

    auto op = std::make_shared<const TruncatedOperator>(build_truncation(spec, N));
    SpectralFamily fam = SpectralFamily::build(op);
    const EigenDecomposition& dec = fam.decomposition();
    const double radius = dec.spectral_radius();
    const double lo = dec.eigenvalues.front();
    const double hi = dec.eigenvalues.back();
    Rng rng(options.seed);

    VerifyReport report;

    {
        CaseSet set;
        set.record(max_abs_offdiag_defect(dec) - 10.0 * dN * ulp(1.0) * scale);
        report.checks.push_back(set.finish("eigenvector-orthonormality"));
    }
    {
        CaseSet set;
        set.record(reconstruction_defect(dec, *op) - 20.0 * dN * ulp(op->max_abs_entry()) * scale);
        report.checks.push_back(set.finish("eigen-reconstruction"));
    }
    {
        CaseSet set;
        for (int t = 0; t < 10; ++t) {
            std::vector<double> x = rng.unit_vector(N);
            SpectralCDF rho = fam.cdf(x);
            double mass = 0.0;
            for (double m : rho.jump_masses) mass += m;
            set.record(std::fabs(mass - rho.total) - 10.0 * dN * ulp(std::max(1.0, rho.total)) * scale);
        }
        report.checks.push_back(set.finish("cdf-mass-completeness"));
    }
    {
        CaseSet set;
        for (int t = 0; t < 20; ++t) {
            std::vector<double> x = rng.unit_vector(N);
            double K = (t % 2 == 0) ? rng.uniform(0.05, 1.2) * std::max(radius, 1.0)
                                    : rng.uniform(1.0, 3.0) * std::max(radius, 1.0);
            TailReport tail = fam.tail_report(x, K);
            double lhs_worst = std::max(K * tail.left_moment, K * tail.right_moment) - tail.lhs;
            set.record(lhs_worst - tail.slack * scale);
        }
        report.checks.push_back(set.finish("tail-first-moment-inequality"));
    }
    {
        CaseSet set;
        const double span = std::max(hi - lo, 1.0);
        for (int t = 0; t < 20; ++t) {
            std::vector<double> x = rng.unit_vector(N);
            double a = rng.uniform(lo - 0.25 * span, hi - 0.1 * span);
            double b = rng.uniform(a + 0.05 * span, hi + 0.25 * span);
            a = nudge_off(a, dec.eigenvalues);
            b = nudge_off(b, dec.eigenvalues);
            std::size_t pieces = 2 + static_cast<std::size_t>(rng.uniform(0.0, 38.0));
            std::vector<double> partition{a};
            for (std::size_t i = 1; i < pieces; ++i) {
                partition.push_back(nudge_off(rng.uniform(a, b), dec.eigenvalues));
            }
            partition.push_back(b);
            std::sort(partition.begin(), partition.end());
            partition.erase(std::unique(partition.begin(), partition.end()), partition.end());
            if (partition.size() < 2) continue;

            double mesh = 0.0;
            for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
                mesh = std::max(mesh, partition[i + 1] - partition[i]);
            }
            std::vector<double> sum = fam.riemann_stieltjes_sum(x, partition);
            std::vector<double> exact = fam.stieltjes_apply(
                [](double lambda) { return lambda; }, partition.front(), partition.back(), x);
            std::vector<double> fa = fam.apply_F(partition.front(), x);
            std::vector<double> fb = fam.apply_F(partition.back(), x);
            double err2 = 0.0, inc2 = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                err2 += (sum[i] - exact[i]) * (sum[i] - exact[i]);
                inc2 += (fb[i] - fa[i]) * (fb[i] - fa[i]);
            }
            set.record(err2 - mesh * mesh * inc2 * (1.0 + 1e-10 * scale));
        }
        report.checks.push_back(set.finish("riemann-sum-mesh-bound"));
    }
    {
        CaseSet set;
        for (int t = 0; t < 10; ++t) {
            std::vector<double> x = rng.unit_vector(N);
            double im = rng.uniform(0.1, 10.0) * (t % 2 == 0 ? 1.0 : -1.0);
            double re = rng.uniform(lo, hi);
            double residual = operational_calculus_residual(fam, *op, {re, im}, x);
            set.record(residual - 100.0 * dN * ulp(nrm2(x) / std::fabs(im)) * scale);
        }
        report.checks.push_back(set.finish("resolvent-spectral-consistency"));
    }
    {
        CaseSet set;
        const double span = std::max(hi - lo, 1.0);
        for (int t = 0; t < 20; ++t) {
            std::vector<double> x = rng.unit_vector(N);
            double a = rng.uniform(lo - 0.2 * span, hi);
            double b = rng.uniform(a, hi + 0.1 * span);
            double c = rng.uniform(b, hi + 0.2 * span);
            double d = rng.uniform(c, hi + 0.3 * span);
            std::vector<double> fa = fam.apply_F(a, x), fb = fam.apply_F(b, x);
            std::vector<double> fc = fam.apply_F(c, x), fd = fam.apply_F(d, x);
            double ip = 0.0;
            for (std::size_t i = 0; i < N; ++i) ip += (fb[i] - fa[i]) * (fd[i] - fc[i]);
            set.record(std::fabs(ip) - 10.0 * dN * ulp(std::max(1.0, dot(x, x))) * scale);
        }
        report.checks.push_back(set.finish("orthogonal-increments"));
    }
    {
        // Tail-limit norms along ascending cutoffs must be exactly
        // nonincreasing; allowed margin 0 regardless of scale.
        CaseSet set;
        ConvergenceStudy study;
        study.spec = spec;
        study.probe = probe;
        study.Ns = {std::max<std::size_t>(N / 4, 2), std::max<std::size_t>(N / 2, 3), N};
        std::sort(study.Ns.begin(), study.Ns.end());
        study.Ns.erase(std::unique(study.Ns.begin(), study.Ns.end()), study.Ns.end());
        if (study.Ns.size() < 3) study.Ns = {N, N + 1, N + 2};
        study.lambda_grid = {lo, hi};
        std::vector<double> Ks;
        for (int k = 0; k < 8; ++k) {
            Ks.push_back(std::max(radius, 1.0) * (0.1 + 0.35 * static_cast<double>(k)));
        }
        TailLimitsReport tails = run_tail_limits(study, Ks);
        for (std::size_t n_idx = 0; n_idx < study.Ns.size(); ++n_idx) {
            for (std::size_t k = 1; k < Ks.size(); ++k) {
                const TailLimitRow& prev = tails.rows[n_idx * Ks.size() + k - 1];
                const TailLimitRow& cur = tails.rows[n_idx * Ks.size() + k];
                set.record(cur.left_norm - prev.left_norm);
                set.record(cur.right_defect - prev.right_defect);
                if (!cur.bound_satisfied) set.record(1.0);
            }
        }
        report.checks.push_back(set.finish("tail-limit-monotonicity"));
    }

    report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const VerifyCheck& c) { return c.pass; });
    return report;
}

}  // namespace finspec
