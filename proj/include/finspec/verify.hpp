#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "finspec/operators.hpp"

namespace finspec {

struct VerifyOptions {
    std::size_t N = 500;
    double tolerance_scale = 1.0;  // multiplies every roundoff allowance; 0 demands exact bounds
    std::uint64_t seed = 1;
};

struct VerifyCheck {
    std::string name;
    std::size_t cases = 0;
    std::size_t violations = 0;
    // Worst (measured - allowed) over all cases; <= 0 passes. Units are
    // check-specific but roundoff-scaled, so a failing margin reports the
    // size of the violation directly.
    double worst_margin = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool pass = false;
};

// Randomized invariant suite over one finite section: eigenbasis quality,
// measure completeness, tail first-moment certificates, Riemann-Stieltjes
// mesh bounds, resolvent consistency, increment orthogonality, and tail-limit
// monotonicity. Deterministic for a fixed (spec, probe, options).
VerifyReport run_verify(const OperatorSpec& spec, const DomainProbe& probe,
                        const VerifyOptions& options);

}  // namespace finspec
