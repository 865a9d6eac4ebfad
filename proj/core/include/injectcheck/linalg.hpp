#pragma once

#include <Eigen/Dense>
#include <optional>

#include "injectcheck/tolerances.hpp"

namespace injectcheck {

// Smallest singular value, i.e. min_{|x|=1} |Mx|. Zero rows contribute
// nothing. Requires rows >= cols (throws DimensionError otherwise).
double smallest_singular_value(const Eigen::MatrixXd& m);

// Numerical rank: number of singular values above tol * sigma_max.
// rank(0-matrix) = 0.
int rank(const Eigen::MatrixXd& m, double tol = tol::kRank);

// A unit vector in the numerical kernel if rank < cols, else nullopt.
std::optional<Eigen::VectorXd> nullspace_vector(const Eigen::MatrixXd& m, double tol = tol::kRank);

}  // namespace injectcheck
