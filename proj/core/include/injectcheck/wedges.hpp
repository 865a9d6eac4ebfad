#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "injectcheck/matrix_io.hpp"
#include "injectcheck/tolerances.hpp"

namespace injectcheck {

// One open full-dimensional cell of the arrangement {x : <w_j, x> = 0}.
// sign_pattern is per row of W (+1 for zero rows by the inclusive
// convention); active holds the rows with sign +1.
struct WedgeCell {
    Eigen::VectorXi sign_pattern;
    Eigen::VectorXd witness;
    IndexSet active;
};

struct WedgeOptions {
    std::size_t budget = tol::kDefaultWedgeBudget;
    double delta_strict = tol::kDeltaStrict;
    // Restrict the enumeration to cells inside the open positive orthant
    // (the n coordinate hyperplanes are added to the arrangement).
    bool orthant_only = false;
};

struct WedgeEnumeration {
    std::vector<WedgeCell> cells;
    std::size_t hyperplane_count = 0;  // distinct hyperplanes among nonzero rows
    // True when some cell decision fell between the empty and interior
    // thresholds; certifiers must degrade to Inconclusive.
    bool uncertain = false;
};

// Incremental hyperplane insertion maintaining a feasibility witness per
// cell. Throws BudgetExceededError (with partial count) past the cap.
WedgeEnumeration enumerate_wedge_cells(const Eigen::MatrixXd& w, const WedgeOptions& opts = {});

// Shorthand returning the cells only.
std::vector<WedgeCell> enumerate_wedges(const Eigen::MatrixXd& w, const WedgeOptions& opts = {});

}  // namespace injectcheck
