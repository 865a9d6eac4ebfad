#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "injectcheck/prng.hpp"
#include "injectcheck/tolerances.hpp"

namespace injectcheck {

// Probability that k iid Gaussian vectors in R^n admit a common strictly
// positive direction: 2^{-(k-1)} * sum_{i<n} C(k-1, i), evaluated in exact
// integer arithmetic before conversion.
double halfspace_probability_exact(int k, int n);

// Exponent of the union bound as a function of the expansivity c.
double union_bound_exponent(double c);

// Smallest c making the union-bound exponent positive (bisection, 1e-3).
double union_bound_threshold();

// Unique positive root of (1/2) erfc(1/sqrt(2c)) = 1/c; about 3.4.
double cstar_lower_solve();

// Generic chamber count of m hyperplanes through the origin in R^n:
// 2 * sum_{i<n} C(m-1, i). Throws std::overflow_error past uint64.
std::uint64_t wedge_count_formula(int m, int n);

// |S(xbar, W)| for xbar = -(1/m) sum_j w_j / |w_j|. Fewer than n active
// rows witnesses the absence of a DSS at xbar. Throws ZeroRowError.
int mean_direction_test(const Eigen::MatrixXd& w);

Eigen::VectorXd mean_direction_point(const Eigen::MatrixXd& w);

struct ExpansivityRow {
    double c = 0.0;
    int m = 0;
    double mean_active_count = 0.0;
    double dss_at_mean_freq = 0.0;
    std::optional<double> exact_injective_freq;  // absent when skipped
};

struct ExpansivityStudy {
    int n = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<ExpansivityRow> rows;
};

struct StudyOptions {
    // Exact certification arm runs only for n at or below this cap.
    int exact_dim_cap = 6;
    std::size_t budget = tol::kDefaultWedgeBudget;
    int threads = 1;
};

// Per-c Monte Carlo over seeded trials: mean-direction active counts,
// DSS-at-mean frequency, and (small n) exact injectivity frequency.
// Trial t of grid entry i uses stream i*trials + t, so runs are replayable
// and embarrassingly parallel.
ExpansivityStudy run_expansivity_study(int n, const std::vector<double>& c_grid, int trials,
                                       std::uint64_t seed, const StudyOptions& opts = {});

// CSV columns: c,mean_active_count,dss_at_mean_freq,exact_injective_freq
// (last field blank when the exact arm was skipped). Byte-deterministic.
void write_study_csv(std::ostream& out, const ExpansivityStudy& study);

}  // namespace injectcheck
