#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "finspec/operators.hpp"

using namespace finspec;

namespace {

std::string data_path(const std::string& name) {
    return std::string(FINSPEC_TEST_DATA_DIR) + "/" + name;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
    REQUIRE(out.good());
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("free jacobi truncation is the 0/1 tridiagonal matrix") {
    TruncatedOperator T = build_truncation(make_free_jacobi(), 3);
    CHECK(T.dim == 3);
    CHECK(T.banded_hint == 1);
    std::vector<double> expected{0, 1, 0, 1, 0, 1, 0, 1, 0};
    CHECK(T.entries == expected);
}

TEST_CASE("diagonal unbounded rate 1 is diag(1..N)") {
    TruncatedOperator T = build_truncation(make_diagonal_unbounded(1.0), 4);
    CHECK(T.banded_hint == 0);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(T.at(i, j) == (i == j ? static_cast<double>(i + 1) : 0.0));
        }
    }
}

TEST_CASE("hermite position N=2 has off-diagonal sqrt(1/2)") {
    TruncatedOperator T = build_truncation(make_hermite_position(), 2);
    CHECK(T.at(0, 0) == 0.0);
    CHECK(T.at(1, 1) == 0.0);
    CHECK(T.at(0, 1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(T.at(0, 1) == T.at(1, 0));
}

TEST_CASE("discrete schroedinger applies the potential polynomial in n") {
    // V(n) = 0.05 n^2, n = 1-based site index.
    TruncatedOperator T = build_truncation(make_discrete_schroedinger({0.0, 0.0, 0.05}), 3);
    CHECK(T.at(0, 0) == doctest::Approx(2.05).epsilon(1e-15));
    CHECK(T.at(1, 1) == doctest::Approx(2.20).epsilon(1e-15));
    CHECK(T.at(2, 2) == doctest::Approx(2.45).epsilon(1e-15));
    CHECK(T.at(0, 1) == -1.0);
    CHECK(T.at(1, 2) == -1.0);
    CHECK(T.at(0, 2) == 0.0);
}

TEST_CASE("truncations are nested: N block of N+1 matches exactly") {
    std::vector<OperatorSpec> specs{make_free_jacobi(), make_hermite_position(),
                                    make_diagonal_unbounded(1.5),
                                    make_discrete_schroedinger({0.1, -0.2})};
    for (const OperatorSpec& spec : specs) {
        CAPTURE(kind_name(spec.kind));
        TruncatedOperator small = build_truncation(spec, 7);
        TruncatedOperator big = build_truncation(spec, 8);
        for (std::size_t i = 0; i < 7; ++i) {
            for (std::size_t j = 0; j < 7; ++j) {
                CHECK(small.at(i, j) == big.at(i, j));
            }
        }
    }
}

TEST_CASE("entries are bitwise symmetric") {
    for (std::size_t N : {1, 2, 13}) {
        TruncatedOperator T = build_truncation(make_hermite_position(), N);
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j) {
                CHECK(T.at(i, j) == T.at(j, i));
            }
        }
    }
}

TEST_CASE("truncation rejects N = 0") {
    CHECK_THROWS_AS(build_truncation(make_free_jacobi(), 0), ConfigError);
}

TEST_CASE("matvec agrees between banded and dense paths") {
    TruncatedOperator T = build_truncation(make_free_jacobi(), 6);
    std::vector<double> x{1, -2, 3, 0.5, 0, 4};
    std::vector<double> fast = T.matvec(x);
    TruncatedOperator dense = T;
    dense.banded_hint.reset();
    std::vector<double> slow = dense.matvec(x);
    for (std::size_t i = 0; i < 6; ++i) CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-15));
}

TEST_CASE("user matrix round-trips through CSV") {
    const std::string path = data_path("sym3.csv");
    write_file(path, "1.5,2,0\n2,-3,0.25\n0,0.25,7\n");
    OperatorSpec spec = load_user_matrix(path);
    TruncatedOperator T = build_truncation(spec, 3);
    CHECK(T.at(0, 0) == 1.5);
    CHECK(T.at(1, 0) == 2.0);
    CHECK(T.at(2, 1) == 0.25);

    TruncatedOperator leading = build_truncation(spec, 2);
    CHECK(leading.dim == 2);
    CHECK(leading.at(1, 1) == -3.0);

    CHECK_THROWS_AS(build_truncation(spec, 4), ConfigError);
}

TEST_CASE("user matrix rejects asymmetry naming the entry pair") {
    const std::string path = data_path("asym.csv");
    write_file(path, "1,2\n3,4\n");
    try {
        load_user_matrix(path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("(0,1)") != std::string::npos);
        CHECK(msg.find("(1,0)") != std::string::npos);
    }
}

TEST_CASE("user matrix rejects malformed input") {
    const std::string ragged = data_path("ragged.csv");
    write_file(ragged, "1,2\n2\n");
    CHECK_THROWS_AS(load_user_matrix(ragged), ConfigError);

    const std::string rect = data_path("rect.csv");
    write_file(rect, "1,2,3\n2,1,0\n");
    CHECK_THROWS_AS(load_user_matrix(rect), ConfigError);

    const std::string junk = data_path("junk.csv");
    write_file(junk, "1,x\nx,1\n");
    CHECK_THROWS_AS(load_user_matrix(junk), ConfigError);

    CHECK_THROWS_AS(load_user_matrix(data_path("missing.csv")), ConfigError);
}

TEST_CASE("basis probe generates e_k and validates the index") {
    DomainProbe probe;
    probe.kind = DomainProbe::Kind::Basis;
    probe.index = 3;
    std::vector<double> x = probe.generate(5);
    CHECK(x == std::vector<double>{0, 0, 1, 0, 0});
    CHECK_THROWS_AS(probe.generate(2), ConfigError);
}

TEST_CASE("power probe generates n^-p") {
    DomainProbe probe;
    probe.kind = DomainProbe::Kind::Power;
    probe.exponent = 2.0;
    std::vector<double> x = probe.generate(3);
    CHECK(x[0] == 1.0);
    CHECK(x[1] == 0.25);
    CHECK(x[2] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("membership: eigenvector of the diagonal family stays bounded") {
    DomainProbe e1;
    DomainReport rep = domain_membership_report(make_diagonal_unbounded(1.0), e1, {10, 100, 1000});
    for (double n : rep.norms) CHECK(n == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.verdict == MembershipVerdict::Bounded);
}

TEST_CASE("membership: harmonic coefficients against diag(n) grow like sqrt(N)") {
    DomainProbe probe;
    probe.kind = DomainProbe::Kind::Power;
    probe.exponent = 1.0;
    DomainReport rep = domain_membership_report(make_diagonal_unbounded(1.0), probe, {10, 100, 1000});
    // ||T_N x||^2 = sum_{n<=N} (n * 1/n)^2 = N.
    CHECK(rep.norms[0] == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
    CHECK(rep.norms[2] == doctest::Approx(std::sqrt(1000.0)).epsilon(1e-12));
    CHECK(rep.verdict == MembershipVerdict::Growing);
}

TEST_CASE("membership: bounded operator keeps every probe bounded") {
    DomainProbe e1;
    DomainReport rep = domain_membership_report(make_free_jacobi(), e1, {10, 50, 100});
    for (double n : rep.norms) CHECK(n == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.verdict == MembershipVerdict::Bounded);
}

TEST_CASE("membership requires at least three ascending sizes") {
    DomainProbe e1;
    CHECK_THROWS_AS(domain_membership_report(make_free_jacobi(), e1, {10, 100}), ConfigError);
    CHECK_THROWS_AS(domain_membership_report(make_free_jacobi(), e1, {10, 10, 100}), ConfigError);
}

}  // TEST_SUITE
