#include "finspec/operators.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace finspec {

const char* kind_name(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::FreeJacobi: return "free-jacobi";
        case OperatorKind::HermitePosition: return "hermite-position";
        case OperatorKind::DiagonalUnbounded: return "diagonal-unbounded";
        case OperatorKind::DiscreteSchroedinger: return "discrete-schroedinger";
        case OperatorKind::UserMatrix: return "user-matrix";
    }
    return "unknown";
}

OperatorSpec make_free_jacobi() {
    OperatorSpec s;
    s.kind = OperatorKind::FreeJacobi;
    return s;
}

OperatorSpec make_hermite_position() {
    OperatorSpec s;
    s.kind = OperatorKind::HermitePosition;
    return s;
}

OperatorSpec make_diagonal_unbounded(double rate) {
    if (!std::isfinite(rate)) throw ConfigError("diagonal-unbounded: rate must be finite");
    OperatorSpec s;
    s.kind = OperatorKind::DiagonalUnbounded;
    s.growth_rate = rate;
    return s;
}

OperatorSpec make_discrete_schroedinger(std::vector<double> potential) {
    for (double c : potential) {
        if (!std::isfinite(c)) throw ConfigError("discrete-schroedinger: potential coefficients must be finite");
    }
    OperatorSpec s;
    s.kind = OperatorKind::DiscreteSchroedinger;
    s.potential = std::move(potential);
    return s;
}

namespace {

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) {
        throw ConfigError("user matrix: cannot parse entry (" + std::to_string(row) + "," +
                          std::to_string(col) + "): '" + cell + "'");
    }
    return v;
}

}  // namespace

OperatorSpec load_user_matrix(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("user matrix: cannot open '" + csv_path + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(parse_cell(cell, rows.size(), row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("user matrix: '" + csv_path + "' is empty");

    const std::size_t n = rows.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw ConfigError("user matrix: row " + std::to_string(i) + " has " +
                              std::to_string(rows[i].size()) + " columns, expected " + std::to_string(n));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rows[i][j] != rows[j][i]) {
                std::ostringstream msg;
                msg << "user matrix: not symmetric, entry (" << i << "," << j << ")=" << rows[i][j]
                    << " but (" << j << "," << i << ")=" << rows[j][i];
                throw ConfigError(msg.str());
            }
        }
    }

    auto flat = std::make_shared<std::vector<double>>();
    flat->reserve(n * n);
    for (const auto& r : rows) flat->insert(flat->end(), r.begin(), r.end());

    OperatorSpec s;
    s.kind = OperatorKind::UserMatrix;
    s.matrix_path = csv_path;
    s.user_entries = std::move(flat);
    s.user_dim = n;
    return s;
}

double TruncatedOperator::max_abs_entry() const {
    double m = 0.0;
    for (double v : entries) m = std::max(m, std::fabs(v));
    return m;
}

std::vector<double> TruncatedOperator::matvec(const std::vector<double>& x) const {
    if (x.size() != dim) throw ConfigError("matvec: vector length does not match operator dimension");
    std::vector<double> y(dim, 0.0);
    if (banded_hint && *banded_hint == 0) {
        for (std::size_t i = 0; i < dim; ++i) y[i] = entries[i * dim + i] * x[i];
        return y;
    }
    if (banded_hint && *banded_hint == 1) {
        for (std::size_t i = 0; i < dim; ++i) {
            double s = entries[i * dim + i] * x[i];
            if (i > 0) s += entries[i * dim + (i - 1)] * x[i - 1];
            if (i + 1 < dim) s += entries[i * dim + (i + 1)] * x[i + 1];
            y[i] = s;
        }
        return y;
    }
    for (std::size_t i = 0; i < dim; ++i) {
        const double* row = entries.data() + i * dim;
        double s = 0.0;
        for (std::size_t j = 0; j < dim; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

namespace {

void set_sym(TruncatedOperator& t, std::size_t i, std::size_t j, double v) {
    t.entries[i * t.dim + j] = v;
    t.entries[j * t.dim + i] = v;
}

double schroedinger_potential(const std::vector<double>& coeffs, std::size_t n) {
    // V(n) = sum_k coeffs[k] * n^k, evaluated by Horner on the 1-based site index.
    double v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) v = v * static_cast<double>(n) + coeffs[k];
    return v;
}

}  // namespace

TruncatedOperator build_truncation(const OperatorSpec& spec, std::size_t N) {
    if (N < 1) throw ConfigError("build_truncation: N must be >= 1");
    TruncatedOperator t;
    t.dim = N;
    t.entries.assign(N * N, 0.0);

    switch (spec.kind) {
        case OperatorKind::FreeJacobi:
            for (std::size_t i = 0; i + 1 < N; ++i) set_sym(t, i, i + 1, 1.0);
            t.banded_hint = (N == 1) ? 0 : 1;
            break;
        case OperatorKind::HermitePosition:
            for (std::size_t i = 0; i + 1 < N; ++i) {
                set_sym(t, i, i + 1, std::sqrt(static_cast<double>(i + 1) / 2.0));
            }
            t.banded_hint = (N == 1) ? 0 : 1;
            break;
        case OperatorKind::DiagonalUnbounded:
            for (std::size_t i = 0; i < N; ++i) {
                set_sym(t, i, i, std::pow(static_cast<double>(i + 1), spec.growth_rate));
            }
            t.banded_hint = 0;
            break;
        case OperatorKind::DiscreteSchroedinger:
            for (std::size_t i = 0; i < N; ++i) {
                set_sym(t, i, i, 2.0 + schroedinger_potential(spec.potential, i + 1));
                if (i + 1 < N) set_sym(t, i, i + 1, -1.0);
            }
            t.banded_hint = (N == 1) ? 0 : 1;
            break;
        case OperatorKind::UserMatrix: {
            if (!spec.user_entries) throw ConfigError("user matrix: spec carries no data (load it first)");
            if (N > spec.user_dim) {
                throw ConfigError("user matrix: requested N=" + std::to_string(N) +
                                  " exceeds matrix size " + std::to_string(spec.user_dim));
            }
            const auto& src = *spec.user_entries;
            std::size_t band = 0;
            for (std::size_t i = 0; i < N; ++i) {
                for (std::size_t j = 0; j < N; ++j) {
                    double v = src[i * spec.user_dim + j];
                    t.entries[i * N + j] = v;
                    if (v != 0.0 && i != j) band = std::max(band, i > j ? i - j : j - i);
                }
            }
            t.banded_hint = band;
            break;
        }
        default:
            throw ConfigError("build_truncation: unknown operator kind");
    }
    return t;
}

std::vector<double> DomainProbe::generate(std::size_t N) const {
    if (N < 1) throw ConfigError("probe: N must be >= 1");
    std::vector<double> x(N, 0.0);
    switch (kind) {
        case Kind::Basis:
            if (index < 1 || index > N) {
                throw ConfigError("probe: basis index " + std::to_string(index) +
                                  " outside 1.." + std::to_string(N));
            }
            x[index - 1] = 1.0;
            break;
        case Kind::Power:
            for (std::size_t n = 1; n <= N; ++n) {
                x[n - 1] = std::pow(static_cast<double>(n), -exponent);
            }
            break;
    }
    double nx = nrm2(x);
    if (nx == 0.0 || !std::isfinite(nx)) throw ConfigError("probe: generated vector must be nonzero and finite");
    return x;
}

DomainReport domain_membership_report(const OperatorSpec& spec, const DomainProbe& probe,
                                      const std::vector<std::size_t>& Ns) {
    if (Ns.size() < 3) throw ConfigError("domain membership: need at least 3 truncation sizes");
    for (std::size_t i = 0; i + 1 < Ns.size(); ++i) {
        if (Ns[i] >= Ns[i + 1]) throw ConfigError("domain membership: truncation sizes must be ascending");
    }
    DomainReport rep;
    rep.Ns = Ns;
    rep.norms.reserve(Ns.size());
    for (std::size_t N : Ns) {
        TruncatedOperator t = build_truncation(spec, N);
        rep.norms.push_back(nrm2(t.matvec(probe.generate(N))));
    }
    // Advisory trend: finitely many N cannot prove membership, so only a clear
    // upward drift of the norm sequence is reported as growth.
    rep.verdict = (rep.norms.back() > 1.25 * rep.norms.front() + 1e-12)
                      ? MembershipVerdict::Growing
                      : MembershipVerdict::Bounded;
    return rep;
}

}  // namespace finspec
