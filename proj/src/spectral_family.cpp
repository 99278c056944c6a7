#include "finspec/spectral_family.hpp"

#include <algorithm>
#include <cmath>

namespace finspec {

double SpectralCDF::evaluate(double lambda) const {
    double s = 0.0;
    for (std::size_t i = 0; i < jump_locations.size() && jump_locations[i] <= lambda; ++i) {
        s += jump_masses[i];
    }
    return s;
}

SpectralFamily SpectralFamily::build(std::shared_ptr<const TruncatedOperator> T,
                                     double cluster_tol, double eig_tol) {
    if (!T) throw ConfigError("spectral family: null operator");
    SpectralFamily fam;
    fam.op_ = std::move(T);
    fam.dec_ = eigendecompose(*fam.op_, eig_tol);
    if (cluster_tol < 0.0) cluster_tol = default_cluster_tolerance(fam.dec_);
    fam.clusters_ = cluster_eigenvalues(fam.dec_, cluster_tol);
    fam.cluster_end_of_.resize(fam.dec_.dim);
    fam.cluster_of_.resize(fam.dec_.dim);
    for (std::size_t c = 0; c < fam.clusters_.size(); ++c) {
        for (std::size_t i = fam.clusters_[c].begin; i < fam.clusters_[c].end; ++i) {
            fam.cluster_end_of_[i] = fam.clusters_[c].end;
            fam.cluster_of_[i] = c;
        }
    }
    return fam;
}

void SpectralFamily::check_dim(const std::vector<double>& x) const {
    if (x.size() != dim()) throw ConfigError("spectral family: vector length does not match dimension");
}

std::size_t SpectralFamily::included_count(double lambda) const {
    const auto& ev = dec_.eigenvalues;
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(ev.begin(), ev.end(), lambda) - ev.begin());
    if (k == 0 || k == ev.size()) return k;
    // A boundary strictly inside a cluster means lambda reached some of its
    // members; the whole cluster is then included.
    return std::max(k, cluster_end_of_[k - 1]);
}

std::vector<double> SpectralFamily::coefficients(const std::vector<double>& x) const {
    check_dim(x);
    const std::size_t n = dim();
    std::vector<double> c(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double* v = dec_.vec(k);
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += v[r] * x[r];
        c[k] = s;
    }
    return c;
}

std::vector<double> SpectralFamily::weighted_reconstruct(const std::vector<double>& cw) const {
    const std::size_t n = dim();
    std::vector<double> y(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (cw[k] == 0.0) continue;
        const double* v = dec_.vec(k);
        const double w = cw[k];
        for (std::size_t r = 0; r < n; ++r) y[r] += w * v[r];
    }
    return y;
}

double SpectralFamily::cluster_representative(const Cluster& c, const std::vector<double>& coeff) const {
    double mass = 0.0, moment = 0.0;
    for (std::size_t i = c.begin; i < c.end; ++i) {
        double m = coeff[i] * coeff[i];
        mass += m;
        moment += m * dec_.eigenvalues[i];
    }
    if (mass == 0.0) {
        double s = 0.0;
        for (std::size_t i = c.begin; i < c.end; ++i) s += dec_.eigenvalues[i];
        return s / static_cast<double>(c.size());
    }
    return moment / mass;
}

std::vector<double> SpectralFamily::apply_F(double lambda, const std::vector<double>& x) const {
    check_dim(x);
    std::vector<double> c = coefficients(x);
    const std::size_t m = included_count(lambda);
    for (std::size_t k = m; k < c.size(); ++k) c[k] = 0.0;
    return weighted_reconstruct(c);
}

SpectralCDF SpectralFamily::cdf(const std::vector<double>& x) const {
    check_dim(x);
    std::vector<double> c = coefficients(x);
    SpectralCDF out;
    out.jump_locations.reserve(clusters_.size());
    out.jump_masses.reserve(clusters_.size());
    for (const Cluster& cl : clusters_) {
        double mass = 0.0;
        for (std::size_t i = cl.begin; i < cl.end; ++i) mass += c[i] * c[i];
        out.jump_locations.push_back(cluster_representative(cl, c));
        out.jump_masses.push_back(mass);
    }
    out.total = dot(x, x);
    return out;
}

std::vector<double> SpectralFamily::stieltjes_apply(const std::function<double(double)>& g,
                                                    double a, double b,
                                                    const std::vector<double>& x) const {
    check_dim(x);
    if (!(a < b)) throw ConfigError("stieltjes_apply: interval must satisfy a < b");
    std::vector<double> c = coefficients(x);
    const std::size_t ka = included_count(a);
    const std::size_t kb = included_count(b);
    std::vector<double> cw(dim(), 0.0);
    for (std::size_t ci = 0; ci < clusters_.size(); ++ci) {
        const Cluster& cl = clusters_[ci];
        if (cl.begin < ka || cl.end > kb) continue;
        double gv = g(cluster_representative(cl, c));
        if (!std::isfinite(gv)) {
            throw ConfigError("stieltjes_apply: integrand is not finite at an in-range eigenvalue");
        }
        for (std::size_t i = cl.begin; i < cl.end; ++i) cw[i] = gv * c[i];
    }
    return weighted_reconstruct(cw);
}

std::vector<std::complex<double>> SpectralFamily::stieltjes_apply_complex(
    const std::function<std::complex<double>(double)>& g, double a, double b,
    const std::vector<double>& x) const {
    check_dim(x);
    if (!(a < b)) throw ConfigError("stieltjes_apply: interval must satisfy a < b");
    std::vector<double> c = coefficients(x);
    const std::size_t ka = included_count(a);
    const std::size_t kb = included_count(b);
    std::vector<double> wre(dim(), 0.0), wim(dim(), 0.0);
    for (std::size_t ci = 0; ci < clusters_.size(); ++ci) {
        const Cluster& cl = clusters_[ci];
        if (cl.begin < ka || cl.end > kb) continue;
        std::complex<double> gv = g(cluster_representative(cl, c));
        if (!std::isfinite(gv.real()) || !std::isfinite(gv.imag())) {
            throw ConfigError("stieltjes_apply: integrand is not finite at an in-range eigenvalue");
        }
        for (std::size_t i = cl.begin; i < cl.end; ++i) {
            wre[i] = gv.real() * c[i];
            wim[i] = gv.imag() * c[i];
        }
    }
    std::vector<double> yre = weighted_reconstruct(wre);
    std::vector<double> yim = weighted_reconstruct(wim);
    std::vector<std::complex<double>> y(dim());
    for (std::size_t r = 0; r < dim(); ++r) y[r] = {yre[r], yim[r]};
    return y;
}

std::vector<double> SpectralFamily::riemann_stieltjes_sum(const std::vector<double>& x,
                                                          const std::vector<double>& partition) const {
    check_dim(x);
    if (partition.size() < 2) throw ConfigError("riemann_stieltjes_sum: partition needs at least 2 points");
    for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
        if (!(partition[i] < partition[i + 1])) {
            throw ConfigError("riemann_stieltjes_sum: partition must be strictly increasing");
        }
    }
    std::vector<double> c = coefficients(x);
    std::vector<double> cw(dim(), 0.0);
    std::size_t prev = included_count(partition.front());
    for (std::size_t k = 1; k < partition.size(); ++k) {
        const double tag = partition[k];
        const std::size_t cur = included_count(tag);
        for (std::size_t i = prev; i < cur; ++i) cw[i] = tag * c[i];
        prev = cur;
    }
    return weighted_reconstruct(cw);
}

double SpectralFamily::diag_first_moment(const std::vector<std::complex<double>>& coeff,
                                         double a, double b) const {
    const std::size_t ka = included_count(a);
    const std::size_t kb = included_count(b);
    double total = 0.0;
    for (const Cluster& cl : clusters_) {
        if (cl.begin < ka || cl.end > kb) continue;
        // g = lambda at the mass-weighted representative times the cluster
        // mass collapses to the cluster's first moment.
        double moment = 0.0;
        for (std::size_t i = cl.begin; i < cl.end; ++i) {
            moment += std::norm(coeff[i]) * dec_.eigenvalues[i];
        }
        total += moment;
    }
    return total;
}

std::complex<double> SpectralFamily::polarization_measure(const std::vector<double>& x,
                                                          const std::vector<double>& y,
                                                          double a, double b) const {
    check_dim(x);
    check_dim(y);
    if (!(a < b)) throw ConfigError("polarization_measure: interval must satisfy a < b");
    std::vector<double> cx = coefficients(x);
    std::vector<double> cy = coefficients(y);
    const std::size_t n = dim();
    std::vector<std::complex<double>> up(n), um(n), uip(n), uim(n);
    for (std::size_t i = 0; i < n; ++i) {
        up[i] = cx[i] + cy[i];
        um[i] = cx[i] - cy[i];
        uip[i] = {cx[i], cy[i]};   // x + i y
        uim[i] = {cx[i], -cy[i]};  // x - i y
    }
    const double q1 = diag_first_moment(up, a, b);
    const double q2 = diag_first_moment(um, a, b);
    const double q3 = diag_first_moment(uip, a, b);
    const double q4 = diag_first_moment(uim, a, b);
    return {0.25 * (q1 - q2), 0.25 * (q3 - q4)};
}

TailReport SpectralFamily::tail_report(const std::vector<double>& x, double K) const {
    check_dim(x);
    if (!(K > 0.0)) throw ConfigError("tail_report: K must be > 0");
    std::vector<double> c = coefficients(x);
    const std::size_t m_left = included_count(-K);
    const std::size_t m_right = included_count(K);

    double left = 0.0;
    for (std::size_t i = 0; i < m_left; ++i) left += dec_.eigenvalues[i] * c[i] * c[i];
    double right = 0.0;
    for (std::size_t i = m_right; i < dim(); ++i) right += dec_.eigenvalues[i] * c[i] * c[i];

    TailReport rep;
    std::vector<double> tx = op_->matvec(x);
    rep.lhs = dot(tx, tx);
    rep.left_moment = std::fabs(left);
    rep.right_moment = std::fabs(right);
    const double scale = std::max({1.0, rep.lhs, K * rep.left_moment, K * rep.right_moment});
    rep.slack = 100.0 * static_cast<double>(dim()) * ulp(scale);
    rep.bound_satisfied = (rep.lhs + rep.slack >= K * rep.left_moment) &&
                          (rep.lhs + rep.slack >= K * rep.right_moment);
    return rep;
}

}  // namespace finspec
