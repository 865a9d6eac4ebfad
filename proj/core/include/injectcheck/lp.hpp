#pragma once

#include <Eigen/Dense>
#include <vector>

namespace injectcheck {

enum class LpRel { Le, Ge, Eq };

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalTrouble };

// Small dense LP in the form
//   maximize  objective . x
//   s.t.      A.row(i) . x  (rel_i)  b_i
//             lo <= x <= hi        (all bounds finite)
struct LinearProgram {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<LpRel> rel;
    Eigen::VectorXd objective;
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

struct LpSolution {
    LpStatus status = LpStatus::NumericalTrouble;
    Eigen::VectorXd x;
    double objective = 0.0;
};

// Two-phase tableau simplex with Bland fallback; sized for the small dense
// instances produced by the arrangement and region engines.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace injectcheck
