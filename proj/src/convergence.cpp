#include "finspec/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

namespace finspec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

double semicircle_cdf(double lambda, double center, double radius) {
    double t = (lambda - center) / radius;
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return 0.5 + (t * std::sqrt(1.0 - t * t) + std::asin(t)) / kPi;
}

double gaussian_cdf(double lambda, double mean, double variance) {
    return 0.5 * (1.0 + std::erf((lambda - mean) / std::sqrt(2.0 * variance)));
}

}  // namespace

double OracleSpec::cdf(double lambda) const {
    switch (kind) {
        case Kind::None:
            return kNaN;
        case Kind::Semicircle:
            return semicircle_cdf(lambda, center, radius);
        case Kind::Gaussian:
            return gaussian_cdf(lambda, mean, variance);
        case Kind::PointMasses: {
            double total = 0.0, below = 0.0;
            for (const auto& [loc, mass] : point_masses) {
                total += mass;
                if (loc <= lambda) below += mass;
            }
            return (total > 0.0) ? below / total : kNaN;
        }
    }
    return kNaN;
}

namespace {

void validate_study(const ConvergenceStudy& study, bool require_grid = true) {
    if (study.Ns.empty()) throw ConfigError("convergence study: truncation list is empty");
    for (std::size_t i = 0; i + 1 < study.Ns.size(); ++i) {
        if (study.Ns[i] >= study.Ns[i + 1]) {
            throw ConfigError("convergence study: truncation sizes must be ascending");
        }
    }
    if (require_grid && study.lambda_grid.empty()) {
        throw ConfigError("convergence study: lambda grid is empty");
    }
    for (std::size_t i = 0; i + 1 < study.lambda_grid.size(); ++i) {
        if (!(study.lambda_grid[i] < study.lambda_grid[i + 1])) {
            throw ConfigError("convergence study: lambda grid must be ascending");
        }
    }
    if (study.deltas.empty()) throw ConfigError("convergence study: delta list is empty");
    for (std::size_t i = 0; i < study.deltas.size(); ++i) {
        if (study.deltas[i] < 0.0) throw ConfigError("convergence study: deltas must be >= 0");
        if (i + 1 < study.deltas.size() && !(study.deltas[i] > study.deltas[i + 1])) {
            throw ConfigError("convergence study: deltas must be strictly descending");
        }
    }
}

bool collides(double p, const std::vector<double>& ev) {
    auto it = std::lower_bound(ev.begin(), ev.end(), p);
    for (auto cand : {it, it == ev.begin() ? it : std::prev(it)}) {
        if (cand != ev.end() && std::fabs(p - *cand) <= 4.0 * ulp(std::max(1.0, std::fabs(*cand)))) {
            return true;
        }
    }
    return false;
}

// Evaluation point for a grid value: either the midpoint of the spectral gap
// containing it, or the value itself nudged off any colliding eigenvalue.
double evaluation_point(double lambda, const std::vector<double>& ev, bool snap) {
    double p = lambda;
    if (snap) {
        auto it = std::upper_bound(ev.begin(), ev.end(), lambda);
        if (it != ev.begin() && it != ev.end()) {
            p = 0.5 * (*std::prev(it) + *it);
        }
    }
    for (int attempt = 0; attempt < 8 && collides(p, ev); ++attempt) p += 1e-9;
    return p;
}

struct PerN {
    std::vector<double> eigenvalues;
    std::vector<double> prefix;  // prefix[k] = sum of c_i^2 for i < k
    std::vector<double> lambda_prefix;  // prefix sums of lambda_i * c_i^2
    double norm2 = 0.0;
    double lhs = 0.0;  // ||T x||^2
    SpectralFamily fam;
};

PerN decompose_one(const ConvergenceStudy& study, std::size_t N) {
    auto op = std::make_shared<const TruncatedOperator>(build_truncation(study.spec, N));
    PerN out{{}, {}, {}, 0.0, 0.0, SpectralFamily::build(op)};
    std::vector<double> x = study.probe.generate(N);
    std::vector<double> c = out.fam.coefficients(x);
    out.eigenvalues = out.fam.decomposition().eigenvalues;
    out.prefix.assign(N + 1, 0.0);
    out.lambda_prefix.assign(N + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        out.prefix[i + 1] = out.prefix[i] + c[i] * c[i];
        out.lambda_prefix[i + 1] = out.lambda_prefix[i] + out.eigenvalues[i] * c[i] * c[i];
    }
    out.norm2 = dot(x, x);
    std::vector<double> tx = op->matvec(x);
    out.lhs = dot(tx, tx);
    return out;
}

template <typename Fn>
void for_each_n(const ConvergenceStudy& study, Fn&& fn) {
    const std::size_t count = study.Ns.size();
    const unsigned workers = std::min<unsigned>(std::max(1u, study.threads),
                                                static_cast<unsigned>(count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

CdfConvergenceReport run_cdf_convergence(const ConvergenceStudy& study) {
    validate_study(study);
    const std::size_t G = study.lambda_grid.size();
    const std::size_t D = study.deltas.size();
    const std::size_t NN = study.Ns.size();
    const bool has_oracle = study.oracle.kind != OracleSpec::Kind::None;

    CdfConvergenceReport rep;
    rep.Ns = study.Ns;
    rep.deltas = study.deltas;
    rep.nominal_grid = study.lambda_grid;
    rep.cells.assign(NN * G * D, CdfCell{});
    rep.sup_distance.assign(NN * D, kNaN);
    rep.stabilization.assign(NN > 1 ? (NN - 1) * D : 0, 0.0);

    for_each_n(study, [&](std::size_t n_idx) {
        PerN per = decompose_one(study, study.Ns[n_idx]);
        std::vector<double> sup(D, has_oracle ? 0.0 : kNaN);
        for (std::size_t j = 0; j < G; ++j) {
            const double p = evaluation_point(study.lambda_grid[j], per.eigenvalues,
                                              study.snap_grid_to_gaps);
            const double oracle_val = has_oracle ? study.oracle.cdf(p) : kNaN;
            for (std::size_t d = 0; d < D; ++d) {
                CdfCell& cell = rep.cells[(n_idx * G + j) * D + d];
                cell.lambda = p;
                cell.cdf = per.prefix[per.fam.included_count(p + study.deltas[d])] / per.norm2;
                cell.oracle = oracle_val;
                cell.abs_error = has_oracle ? std::fabs(cell.cdf - oracle_val) : kNaN;
                if (has_oracle) sup[d] = std::max(sup[d], cell.abs_error);
            }
        }
        for (std::size_t d = 0; d < D; ++d) rep.sup_distance[n_idx * D + d] = sup[d];
    });

    for (std::size_t n_idx = 0; n_idx + 1 < NN; ++n_idx) {
        for (std::size_t d = 0; d < D; ++d) {
            double worst = 0.0;
            for (std::size_t j = 0; j < G; ++j) {
                worst = std::max(worst, std::fabs(rep.cell(n_idx, j, d).cdf -
                                                  rep.cell(n_idx + 1, j, d).cdf));
            }
            rep.stabilization[n_idx * D + d] = worst;
        }
    }
    return rep;
}

TailLimitsReport run_tail_limits(const ConvergenceStudy& study, const std::vector<double>& Ks) {
    validate_study(study, /*require_grid=*/false);
    if (Ks.empty()) throw ConfigError("tail limits: cutoff list is empty");
    for (std::size_t i = 0; i < Ks.size(); ++i) {
        if (!(Ks[i] > 0.0)) throw ConfigError("tail limits: cutoffs must be > 0");
        if (i + 1 < Ks.size() && !(Ks[i] < Ks[i + 1])) {
            throw ConfigError("tail limits: cutoffs must be ascending");
        }
    }
    DomainReport membership = domain_membership_report(study.spec, study.probe, study.Ns);
    if (membership.verdict != MembershipVerdict::Bounded) {
        throw ConfigError("tail limits: probe fails the domain-membership check "
                          "(||T_N x|| grows along the truncation sizes)");
    }

    TailLimitsReport rep;
    rep.rows.assign(study.Ns.size() * Ks.size(), TailLimitRow{});
    for_each_n(study, [&](std::size_t n_idx) {
        PerN per = decompose_one(study, study.Ns[n_idx]);
        const std::size_t N = study.Ns[n_idx];
        const double total = per.prefix[N];
        const double lambda_total = per.lambda_prefix[N];
        for (std::size_t k = 0; k < Ks.size(); ++k) {
            const double K = Ks[k];
            const std::size_t m_left = per.fam.included_count(-K);
            const std::size_t m_right = per.fam.included_count(K);
            TailLimitRow row;
            row.N = N;
            row.K = K;
            row.left_norm = std::sqrt(per.prefix[m_left]);
            row.right_defect = std::sqrt(std::max(0.0, total - per.prefix[m_right]));
            row.lhs = per.lhs;
            row.left_moment = std::fabs(per.lambda_prefix[m_left]);
            row.right_moment = std::fabs(lambda_total - per.lambda_prefix[m_right]);
            const double scale = std::max({1.0, row.lhs, K * row.left_moment, K * row.right_moment});
            const double slack = 100.0 * static_cast<double>(N) * ulp(scale);
            row.bound_satisfied = (row.lhs + slack >= K * row.left_moment) &&
                                  (row.lhs + slack >= K * row.right_moment);
            rep.rows[n_idx * Ks.size() + k] = row;
        }
    });
    return rep;
}

std::vector<double> discontinuity_scan(const ConvergenceStudy& study) {
    validate_study(study);
    if (study.Ns.size() < 2) throw ConfigError("discontinuity scan: need at least 2 truncation sizes");
    if (study.lambda_grid.size() < 2) throw ConfigError("discontinuity scan: need at least 2 grid points");

    const std::size_t cells = study.lambda_grid.size() - 1;
    // Per N: the largest single-cluster mass fraction inside each grid cell,
    // and the location of that cluster.
    std::vector<std::vector<double>> max_frac(study.Ns.size(), std::vector<double>(cells, 0.0));
    std::vector<std::vector<double>> max_loc(study.Ns.size(), std::vector<double>(cells, kNaN));

    for_each_n(study, [&](std::size_t n_idx) {
        const std::size_t N = study.Ns[n_idx];
        auto op = std::make_shared<const TruncatedOperator>(build_truncation(study.spec, N));
        SpectralFamily fam = SpectralFamily::build(op);
        std::vector<double> x = study.probe.generate(N);
        SpectralCDF rho = fam.cdf(x);
        if (rho.total == 0.0) return;
        for (std::size_t a = 0; a < rho.jump_locations.size(); ++a) {
            const double loc = rho.jump_locations[a];
            auto it = std::lower_bound(study.lambda_grid.begin(), study.lambda_grid.end(), loc);
            if (it == study.lambda_grid.begin() || it == study.lambda_grid.end()) continue;
            const std::size_t cell = static_cast<std::size_t>(it - study.lambda_grid.begin()) - 1;
            const double frac = rho.jump_masses[a] / rho.total;
            if (frac > max_frac[n_idx][cell]) {
                max_frac[n_idx][cell] = frac;
                max_loc[n_idx][cell] = loc;
            }
        }
    });

    std::vector<double> flagged;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        bool persistent = true;
        for (std::size_t n_idx = 0; n_idx < study.Ns.size(); ++n_idx) {
            if (max_frac[n_idx][cell] < study.atom_threshold) {
                persistent = false;
                break;
            }
        }
        if (persistent) flagged.push_back(max_loc.back()[cell]);
    }
    return flagged;
}

}  // namespace finspec
