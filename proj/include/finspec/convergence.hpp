#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "finspec/operators.hpp"
#include "finspec/spectral_family.hpp"

namespace finspec {

// Analytic limit CDF a finite-section CDF is compared against.
// All kinds evaluate normalized to total mass 1.
struct OracleSpec {
    enum class Kind { None, Semicircle, Gaussian, PointMasses };
    Kind kind = Kind::None;
    double center = 0.0;    // Semicircle
    double radius = 2.0;    // Semicircle
    double mean = 0.0;      // Gaussian
    double variance = 1.0;  // Gaussian
    std::vector<std::pair<double, double>> point_masses;  // (location, mass)

    double cdf(double lambda) const;
};

// Sweep description: truncation sizes N, evaluation grid, and descending
// right-continuity offsets delta (0 allowed; F is evaluated at lambda+delta).
struct ConvergenceStudy {
    OperatorSpec spec;
    DomainProbe probe;
    std::vector<std::size_t> Ns;      // ascending
    std::vector<double> lambda_grid;  // ascending
    std::vector<double> deltas{0.0};  // descending, >= 0
    OracleSpec oracle;
    // Replace each grid point by the midpoint of the spectral gap containing
    // it, reading the step CDF away from its atoms.
    bool snap_grid_to_gaps = false;
    double atom_threshold = 0.05;  // persistent-atom fraction of ||x||^2
    unsigned threads = 1;
};

struct CdfCell {
    double lambda = 0.0;  // evaluation point actually used (post snap/nudge)
    double cdf = 0.0;     // (F(lambda+delta)x, x) / ||x||^2
    double oracle = 0.0;  // NaN when no oracle is configured
    double abs_error = 0.0;
};

struct CdfConvergenceReport {
    std::vector<std::size_t> Ns;
    std::vector<double> deltas;
    std::vector<double> nominal_grid;
    std::vector<CdfCell> cells;           // [n][grid][delta] flattened
    std::vector<double> sup_distance;     // [n][delta]; NaN without an oracle
    std::vector<double> stabilization;    // [n-1][delta]: max grid gap between consecutive N

    const CdfCell& cell(std::size_t n_idx, std::size_t grid_idx, std::size_t delta_idx) const {
        return cells[(n_idx * nominal_grid.size() + grid_idx) * deltas.size() + delta_idx];
    }
    double sup(std::size_t n_idx, std::size_t delta_idx) const {
        return sup_distance[n_idx * deltas.size() + delta_idx];
    }
};

CdfConvergenceReport run_cdf_convergence(const ConvergenceStudy& study);

struct TailLimitRow {
    std::size_t N = 0;
    double K = 0.0;
    double left_norm = 0.0;     // ||F(-K) x||
    double right_defect = 0.0;  // ||x - F(K) x||
    double lhs = 0.0;           // ||T x||^2
    double left_moment = 0.0;
    double right_moment = 0.0;
    bool bound_satisfied = false;
};

struct TailLimitsReport {
    std::vector<TailLimitRow> rows;  // per N, Ks ascending within each N
};

// Tail decay of the spectral family along growing cutoffs K, with the tail
// first-moment certificate at each K. left_norm and right_defect are computed
// from shared prefix sums, so for fixed N they are exactly nonincreasing in K.
// Requires the probe to pass the domain-membership check over study.Ns.
TailLimitsReport run_tail_limits(const ConvergenceStudy& study, const std::vector<double>& Ks);

// Grid cells whose maximal single-cluster mass stays at or above
// atom_threshold * ||x||^2 for every N mark discontinuity candidates of the
// limit; returns the persistent atom locations read off the largest N.
std::vector<double> discontinuity_scan(const ConvergenceStudy& study);

}  // namespace finspec
