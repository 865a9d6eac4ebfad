#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "injectcheck/dss.hpp"
#include "injectcheck/prng.hpp"

namespace injectcheck {

// Worst-case inverse Lipschitz data for an injective ReLU layer:
//   C(W) = (2m)^{-1/2} * min over active sets of sigma_min(W|_S),
// where the minimum over all x reduces to the open wedges because active
// sets only grow on boundaries.
struct StabilityReport {
    int m = 0;
    int n = 0;
    std::optional<double> c_exact;
    std::optional<double> c_sampled;
    std::optional<double> empirical_min_ratio;
    std::optional<Eigen::VectorXi> argmin_pattern;
};

struct StabilityOptions {
    std::size_t budget = tol::kDefaultWedgeBudget;
    double rank_tol = tol::kRank;
};

// Exact constant by wedge enumeration. Throws NotInjectiveError when the
// layer fails certification; a blown budget leaves c_exact absent.
StabilityReport inverse_lipschitz_exact(const Eigen::MatrixXd& w, const StabilityOptions& opts = {});

// Sampling surrogate: (2m)^{-1/2} * min over sampled directions of
// sigma_min(W|_{S(x,W)}). Upper-bounds the exact constant.
double inverse_lipschitz_sampled(const Eigen::MatrixXd& w, int trials, Prng& prng);

// min over sampled pairs of |ReLU(Wx0+b) - ReLU(Wx1+b)| / |x0 - x1|.
// Half the pairs are drawn at log-uniform distances to probe wedge
// crossings, half independently on the sphere.
double empirical_min_ratio(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, int pairs, Prng& prng);

// Checks both colinear-additivity inequalities along the segment x1 -> x2
// with the given breakpoints t_1 = 0 <= ... <= t_last = 1.
bool colinear_additivity_check(const Eigen::MatrixXd& w, const Eigen::VectorXd& x1,
                               const Eigen::VectorXd& x2, const std::vector<double>& breakpoints);

}  // namespace injectcheck
