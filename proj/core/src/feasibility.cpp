#include "injectcheck/feasibility.hpp"

#include <cmath>

#include "injectcheck/errors.hpp"
#include "injectcheck/lp.hpp"

namespace injectcheck {

ConstraintSet ConstraintSet::empty(int nvars) {
    ConstraintSet cs;
    cs.eq_A = Eigen::MatrixXd::Zero(0, nvars);
    cs.eq_b = Eigen::VectorXd::Zero(0);
    cs.weak_A = Eigen::MatrixXd::Zero(0, nvars);
    cs.weak_b = Eigen::VectorXd::Zero(0);
    cs.strict_A = Eigen::MatrixXd::Zero(0, nvars);
    cs.strict_b = Eigen::VectorXd::Zero(0);
    return cs;
}

int ConstraintSet::vars() const { return static_cast<int>(eq_A.cols()); }

namespace {

struct NormalizedRows {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

// Unit-normalizes rows; constant (zero) rows are decided in place.
// Returns false for a provably violated constant row.
bool normalize_group(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, LpRel rel,
                     NormalizedRows& out, bool& degenerate) {
    std::vector<int> keep;
    for (int i = 0; i < A.rows(); ++i) {
        const double nrm = A.row(i).norm();
        if (nrm <= tol::kZeroRow) {
            const double rhs = b[i];
            switch (rel) {
                case LpRel::Eq:
                    if (std::abs(rhs) > tol::kTauFeas) return false;
                    break;
                case LpRel::Ge:  // 0 >= rhs
                    if (rhs > tol::kTauFeas) return false;
                    break;
                case LpRel::Le:  // used here for strict "0 > rhs"
                    if (rhs > tol::kTauFeas) return false;
                    if (rhs > -tol::kTauFeas) degenerate = true;
                    break;
            }
            continue;
        }
        keep.push_back(i);
    }
    out.A.resize(static_cast<Eigen::Index>(keep.size()), A.cols());
    out.b.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        const double nrm = A.row(keep[k]).norm();
        out.A.row(static_cast<Eigen::Index>(k)) = A.row(keep[k]) / nrm;
        out.b[static_cast<Eigen::Index>(k)] = b[keep[k]] / nrm;
    }
    return true;
}

}  // namespace

FeasibilityResult linear_feasibility(const ConstraintSet& cs, const FeasibilityOptions& opts) {
    const int n = cs.vars();
    if (cs.weak_A.cols() != n || cs.strict_A.cols() != n ||
        cs.eq_A.rows() != cs.eq_b.size() || cs.weak_A.rows() != cs.weak_b.size() ||
        cs.strict_A.rows() != cs.strict_b.size())
        throw DimensionError("linear_feasibility: inconsistent constraint shapes");
    if (n < 1) throw DimensionError("linear_feasibility: no variables");

    bool degenerate = false;
    NormalizedRows eq, weak, strict;
    if (!normalize_group(cs.eq_A, cs.eq_b, LpRel::Eq, eq, degenerate) ||
        !normalize_group(cs.weak_A, cs.weak_b, LpRel::Ge, weak, degenerate) ||
        !normalize_group(cs.strict_A, cs.strict_b, LpRel::Le, strict, degenerate))
        return {FeasStatus::Infeasible, std::nullopt, 0.0};

    const int me = static_cast<int>(eq.A.rows());
    const int mw = static_cast<int>(weak.A.rows());
    const int ms = static_cast<int>(strict.A.rows());

    // Stage 1: the weak relaxation. A provably empty closure settles it.
    bool closure_interior_to_box = false;
    {
        LinearProgram lp;
        lp.A.resize(me + mw + ms, n);
        lp.b.resize(me + mw + ms);
        lp.A << eq.A, weak.A, strict.A;
        lp.b << eq.b, weak.b, strict.b;
        lp.rel.assign(static_cast<std::size_t>(me), LpRel::Eq);
        lp.rel.insert(lp.rel.end(), static_cast<std::size_t>(mw + ms), LpRel::Ge);
        lp.objective = Eigen::VectorXd::Zero(n);
        lp.lo = Eigen::VectorXd::Constant(n, -opts.box);
        lp.hi = Eigen::VectorXd::Constant(n, opts.box);
        const LpSolution sol = solve_lp(lp);
        if (sol.status == LpStatus::Infeasible) return {FeasStatus::Infeasible, std::nullopt, 0.0};
        if (sol.status != LpStatus::Optimal) return {FeasStatus::Inconclusive, std::nullopt, 0.0};
        if (ms == 0 && !degenerate) {
            return {FeasStatus::Feasible, sol.x, 0.0};
        }
        closure_interior_to_box = sol.x.cwiseAbs().maxCoeff() < 0.999 * opts.box;
    }
    if (degenerate) return {FeasStatus::Inconclusive, std::nullopt, 0.0};

    // Stage 2: maximize the common margin t of the strict rows.
    LinearProgram lp;
    lp.A.resize(me + mw + ms, n + 1);
    lp.b.resize(me + mw + ms);
    lp.A.block(0, 0, me, n) = eq.A;
    lp.A.block(me, 0, mw, n) = weak.A;
    lp.A.block(me + mw, 0, ms, n) = strict.A;
    lp.A.col(n).setZero();
    lp.A.col(n).segment(me + mw, ms).setConstant(-1.0);
    lp.b << eq.b, weak.b, strict.b;
    lp.rel.assign(static_cast<std::size_t>(me), LpRel::Eq);
    lp.rel.insert(lp.rel.end(), static_cast<std::size_t>(mw + ms), LpRel::Ge);
    lp.objective = Eigen::VectorXd::Zero(n + 1);
    lp.objective[n] = 1.0;
    lp.lo = Eigen::VectorXd::Constant(n + 1, -opts.box);
    lp.hi = Eigen::VectorXd::Constant(n + 1, opts.box);
    lp.lo[n] = -1.0;
    lp.hi[n] = 1.0;

    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible) return {FeasStatus::Infeasible, std::nullopt, 0.0};
    if (sol.status != LpStatus::Optimal) return {FeasStatus::Inconclusive, std::nullopt, 0.0};
    const double margin = sol.x[n];
    if (margin < opts.delta_strict) {
        // An optimal margin of zero with a closure point strictly inside the
        // box rules out strict points everywhere: any such point would lift
        // the margin along the segment toward it.
        if (margin <= tol::kEmptyMargin && closure_interior_to_box)
            return {FeasStatus::Infeasible, std::nullopt, margin};
        return {FeasStatus::Inconclusive, std::nullopt, margin};
    }

    // Re-verify the witness against the original rows.
    Eigen::VectorXd x = sol.x.head(n);
    if (me > 0 && ((eq.A * x - eq.b).cwiseAbs().maxCoeff() > tol::kTauFeas))
        return {FeasStatus::Inconclusive, std::nullopt, margin};
    if (mw > 0 && ((weak.A * x - weak.b).minCoeff() < -tol::kTauFeas))
        return {FeasStatus::Inconclusive, std::nullopt, margin};
    if (ms > 0 && ((strict.A * x - strict.b).minCoeff() < opts.delta_strict / 2))
        return {FeasStatus::Inconclusive, std::nullopt, margin};
    return {FeasStatus::Feasible, x, margin};
}

}  // namespace injectcheck
