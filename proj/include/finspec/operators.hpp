#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "finspec/numeric.hpp"

namespace finspec {

enum class OperatorKind {
    FreeJacobi,           // diagonal 0, off-diagonal 1
    HermitePosition,      // diagonal 0, off-diagonal b_n = sqrt(n/2)
    DiagonalUnbounded,    // diagonal n^rate, n = 1..N
    DiscreteSchroedinger, // off-diagonal -1, diagonal 2 + V(n), n = 1..N
    UserMatrix,           // dense symmetric matrix loaded from CSV
};

const char* kind_name(OperatorKind kind);

struct OperatorSpec {
    OperatorKind kind = OperatorKind::FreeJacobi;
    double growth_rate = 1.0;        // DiagonalUnbounded
    std::vector<double> potential;   // DiscreteSchroedinger: V(n) = sum_k potential[k] * n^k
    std::string matrix_path;         // UserMatrix source, for diagnostics
    std::shared_ptr<const std::vector<double>> user_entries;  // row-major, validated symmetric
    std::size_t user_dim = 0;
};

OperatorSpec make_free_jacobi();
OperatorSpec make_hermite_position();
OperatorSpec make_diagonal_unbounded(double rate);
OperatorSpec make_discrete_schroedinger(std::vector<double> potential);

// Parses an N x N CSV of decimal floats. Rejects ragged or non-square input
// and any pair entries[i][j] != entries[j][i] (exact comparison, no repair).
OperatorSpec load_user_matrix(const std::string& csv_path);

// The finite section: a real symmetric N x N matrix. Entries are constructed
// symmetrically, so entries[i*dim+j] == entries[j*dim+i] holds bitwise.
struct TruncatedOperator {
    std::size_t dim = 0;
    std::vector<double> entries;             // row-major
    std::optional<std::size_t> banded_hint;  // 0 = diagonal, 1 = tridiagonal

    double at(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
    double max_abs_entry() const;
    std::vector<double> matvec(const std::vector<double>& x) const;
};

// Leading principal N x N submatrix of the family; nested across N.
TruncatedOperator build_truncation(const OperatorSpec& spec, std::size_t N);

// Rule generating the first N coordinates of a probe vector x.
struct DomainProbe {
    enum class Kind {
        Basis,  // x = e_index (1-based)
        Power,  // x_n = n^(-exponent)
    };
    Kind kind = Kind::Basis;
    std::size_t index = 1;
    double exponent = 1.0;
    std::string label;

    std::vector<double> generate(std::size_t N) const;
};

enum class MembershipVerdict { Bounded, Growing };

struct DomainReport {
    std::vector<std::size_t> Ns;
    std::vector<double> norms;  // ||T_N x_N|| per N
    MembershipVerdict verdict;
};

// Advisory domain-membership check: x is treated as lying in the operator
// domain when ||T_N x_N|| stays bounded along the given truncation sizes.
DomainReport domain_membership_report(const OperatorSpec& spec, const DomainProbe& probe,
                                      const std::vector<std::size_t>& Ns);

}  // namespace finspec
