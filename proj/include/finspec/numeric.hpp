#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace finspec {

// Raised for malformed inputs: bad config values, asymmetric matrices,
// dimension mismatches. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when an iteration fails to converge or a refinement cap is hit.
// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Distance from |x| to the next representable double above it.
// ulp(0) is the smallest subnormal; callers who need a floor against
// that should pass max(1, |x|).
inline double ulp(double x) {
    double a = std::fabs(x);
    return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double nrm2(const std::vector<double>& x) {
    return std::sqrt(dot(x, x));
}

inline std::complex<double> cdot(const std::vector<std::complex<double>>& x,
                                 const std::vector<std::complex<double>>& y) {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

inline double cnrm2(const std::vector<std::complex<double>>& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

// Deterministic generator: a fixed seed must reproduce the same stream on
// every platform, so the uniform mapping is spelled out instead of relying
// on std::uniform_real_distribution (whose output is unspecified).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    std::vector<double> unit_vector(std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = uniform(-1.0, 1.0);
        double nv = nrm2(v);
        if (nv == 0.0) { v[0] = 1.0; nv = 1.0; }
        for (auto& x : v) x /= nv;
        return v;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace finspec
