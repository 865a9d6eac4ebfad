#pragma once

#include <Eigen/Dense>
#include <optional>

#include "injectcheck/tolerances.hpp"

namespace injectcheck {

enum class FeasStatus { Feasible, Infeasible, Inconclusive };

struct FeasibilityResult {
    FeasStatus status = FeasStatus::Inconclusive;
    std::optional<Eigen::VectorXd> witness;
    double margin = 0.0;  // certified interior margin of strict rows (unit-normalized)
};

// One linear system over a shared variable dimension:
//   eq_A x = eq_b,  weak_A x >= weak_b,  strict_A x > strict_b.
// Matrices may have zero rows (pass 0xN blocks for absent groups).
struct ConstraintSet {
    Eigen::MatrixXd eq_A;
    Eigen::VectorXd eq_b;
    Eigen::MatrixXd weak_A;
    Eigen::VectorXd weak_b;
    Eigen::MatrixXd strict_A;
    Eigen::VectorXd strict_b;

    static ConstraintSet empty(int nvars);
    int vars() const;
};

struct FeasibilityOptions {
    double delta_strict = tol::kDeltaStrict;
    // Search box; a region living entirely outside it degrades the answer to
    // Inconclusive rather than a wrong certificate.
    double box = 1e4;
};

// Phase-1 simplex over the weak relaxation, then margin maximization with
// strict rows interiorized by delta_strict. Tri-state: interiorization can
// fail on thin regions without proving emptiness.
FeasibilityResult linear_feasibility(const ConstraintSet& cs, const FeasibilityOptions& opts = {});

}  // namespace injectcheck
