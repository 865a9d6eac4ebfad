#include "injectcheck/lp.hpp"

#include <cmath>
#include <limits>

#include "injectcheck/errors.hpp"

namespace injectcheck {

namespace {

constexpr double kPivotEps = 1e-10;
constexpr double kCostEps = 1e-9;
constexpr double kFeasEps = 1e-8;

struct Tableau {
    Eigen::MatrixXd t;       // m rows of constraints, plus cost row at index m
    std::vector<int> basis;  // basic column per constraint row
    int m = 0;
    int ncols = 0;  // excluding rhs column
};

// Pivot on (row, col), normalizing the pivot row and eliminating elsewhere.
void pivot(Tableau& tab, int prow, int pcol) {
    tab.t.row(prow) /= tab.t(prow, pcol);
    for (int i = 0; i <= tab.m; ++i) {
        if (i == prow) continue;
        const double f = tab.t(i, pcol);
        if (std::abs(f) > 0.0) tab.t.row(i) -= f * tab.t.row(prow);
    }
    tab.basis[static_cast<std::size_t>(prow)] = pcol;
}

// Runs the max-simplex on the current cost row. `banned` columns never enter.
LpStatus run_simplex(Tableau& tab, const std::vector<bool>& banned) {
    const int iter_cap = 2000 + 200 * tab.m;
    int since_improve = 0;
    bool bland = false;
    double last_obj = tab.t(tab.m, tab.ncols);
    for (int iter = 0; iter < iter_cap; ++iter) {
        // Entering column: cost row holds z_j - c_j; pick negative.
        int pcol = -1;
        if (!bland) {
            double best = -kCostEps;
            for (int j = 0; j < tab.ncols; ++j) {
                if (banned[static_cast<std::size_t>(j)]) continue;
                const double rc = tab.t(tab.m, j);
                if (rc < best) {
                    best = rc;
                    pcol = j;
                }
            }
        } else {
            for (int j = 0; j < tab.ncols; ++j) {
                if (banned[static_cast<std::size_t>(j)]) continue;
                if (tab.t(tab.m, j) < -kCostEps) {
                    pcol = j;
                    break;
                }
            }
        }
        if (pcol < 0) return LpStatus::Optimal;

        int prow = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < tab.m; ++i) {
            const double a = tab.t(i, pcol);
            if (a > kPivotEps) {
                const double ratio = tab.t(i, tab.ncols) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && prow >= 0 &&
                     tab.basis[static_cast<std::size_t>(i)] < tab.basis[static_cast<std::size_t>(prow)])) {
                    best_ratio = ratio;
                    prow = i;
                }
            }
        }
        if (prow < 0) return LpStatus::Unbounded;
        pivot(tab, prow, pcol);

        const double obj = tab.t(tab.m, tab.ncols);
        if (obj > last_obj + kCostEps * (1.0 + std::abs(last_obj))) {
            last_obj = obj;
            since_improve = 0;
        } else if (++since_improve > 60) {
            bland = true;
        }
    }
    return LpStatus::NumericalTrouble;
}

void install_cost_row(Tableau& tab, const Eigen::VectorXd& cost) {
    // Cost row = -c, then eliminate basic columns.
    for (int j = 0; j < tab.ncols; ++j) tab.t(tab.m, j) = -cost[j];
    tab.t(tab.m, tab.ncols) = 0.0;
    for (int i = 0; i < tab.m; ++i) {
        const int bj = tab.basis[static_cast<std::size_t>(i)];
        const double cb = cost[bj];
        if (cb != 0.0) tab.t.row(tab.m) += cb * tab.t.row(i);
    }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const int ns = static_cast<int>(lp.A.cols());
    const int mrows = static_cast<int>(lp.A.rows());
    if (lp.b.size() != mrows || static_cast<int>(lp.rel.size()) != mrows ||
        lp.objective.size() != ns || lp.lo.size() != ns || lp.hi.size() != ns)
        throw DimensionError("solve_lp: inconsistent problem shapes");

    // Shift x = lo + z with z in [0, u]; finite u enforced by adding rows.
    Eigen::VectorXd u = lp.hi - lp.lo;
    for (int j = 0; j < ns; ++j) {
        if (!(u[j] >= 0.0) || !std::isfinite(u[j]))
            throw DimensionError("solve_lp: bounds must be finite with lo <= hi");
    }

    struct Row {
        Eigen::VectorXd a;
        double rhs;
        LpRel rel;
    };
    std::vector<Row> rows;
    rows.reserve(static_cast<std::size_t>(mrows + ns));
    for (int i = 0; i < mrows; ++i) {
        Row r{lp.A.row(i).transpose(), lp.b[i] - lp.A.row(i).dot(lp.lo), lp.rel[i]};
        const double nrm = r.a.norm();
        if (nrm > 0.0) {
            r.a /= nrm;
            r.rhs /= nrm;
        } else {
            // Constant row: decide directly.
            const bool ok = (r.rel == LpRel::Le && r.rhs >= -kFeasEps) ||
                            (r.rel == LpRel::Ge && r.rhs <= kFeasEps) ||
                            (r.rel == LpRel::Eq && std::abs(r.rhs) <= kFeasEps);
            if (!ok) return {LpStatus::Infeasible, Eigen::VectorXd(), 0.0};
            continue;
        }
        if (r.rel == LpRel::Ge) {
            r.a = -r.a;
            r.rhs = -r.rhs;
            r.rel = LpRel::Le;
        }
        rows.push_back(std::move(r));
    }
    for (int j = 0; j < ns; ++j) {
        Row r{Eigen::VectorXd::Unit(ns, j), u[j], LpRel::Le};
        rows.push_back(std::move(r));
    }

    const int m = static_cast<int>(rows.size());
    // Column layout: structural | one slack/surplus per row | artificials.
    int nart = 0;
    for (const Row& r : rows)
        if (r.rel == LpRel::Eq || r.rhs < 0.0) ++nart;
    const int ncols = ns + m + nart;

    Tableau tab;
    tab.m = m;
    tab.ncols = ncols;
    tab.t = Eigen::MatrixXd::Zero(m + 1, ncols + 1);
    tab.basis.assign(static_cast<std::size_t>(m), -1);

    int art_at = ns + m;
    for (int i = 0; i < m; ++i) {
        Row r = rows[static_cast<std::size_t>(i)];
        const int scol = ns + i;
        if (r.rel == LpRel::Le) {
            if (r.rhs >= 0.0) {
                tab.t.row(i).head(ns) = r.a.transpose();
                tab.t(i, scol) = 1.0;
                tab.t(i, ncols) = r.rhs;
                tab.basis[static_cast<std::size_t>(i)] = scol;
            } else {
                // a z <= rhs < 0  ->  (-a) z - s = -rhs > 0, artificial basis.
                tab.t.row(i).head(ns) = -r.a.transpose();
                tab.t(i, scol) = -1.0;
                tab.t(i, art_at) = 1.0;
                tab.t(i, ncols) = -r.rhs;
                tab.basis[static_cast<std::size_t>(i)] = art_at++;
            }
        } else {  // Eq
            if (r.rhs < 0.0) {
                r.a = -r.a;
                r.rhs = -r.rhs;
            }
            tab.t.row(i).head(ns) = r.a.transpose();
            tab.t(i, art_at) = 1.0;
            tab.t(i, ncols) = r.rhs;
            tab.basis[static_cast<std::size_t>(i)] = art_at++;
        }
    }

    std::vector<bool> banned(static_cast<std::size_t>(ncols), false);

    // Phase 1: drive artificials to zero.
    if (nart > 0) {
        Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(ncols);
        for (int j = ns + m; j < ncols; ++j) phase1[j] = -1.0;
        install_cost_row(tab, phase1);
        const LpStatus st = run_simplex(tab, banned);
        if (st == LpStatus::NumericalTrouble) return {st, Eigen::VectorXd(), 0.0};
        if (tab.t(tab.m, ncols) < -kFeasEps) return {LpStatus::Infeasible, Eigen::VectorXd(), 0.0};
        // Pivot artificials out of the basis where a structural pivot exists.
        for (int i = 0; i < m; ++i) {
            if (tab.basis[static_cast<std::size_t>(i)] < ns + m) continue;
            int pcol = -1;
            for (int j = 0; j < ns + m; ++j) {
                if (std::abs(tab.t(i, j)) > 1e-7) {
                    pcol = j;
                    break;
                }
            }
            if (pcol >= 0) pivot(tab, i, pcol);
        }
        for (int j = ns + m; j < ncols; ++j) banned[static_cast<std::size_t>(j)] = true;
    }

    // Phase 2.
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncols);
    cost.head(ns) = lp.objective;
    install_cost_row(tab, cost);
    const LpStatus st = run_simplex(tab, banned);
    if (st == LpStatus::NumericalTrouble || st == LpStatus::Unbounded)
        return {st, Eigen::VectorXd(), 0.0};

    Eigen::VectorXd z = Eigen::VectorXd::Zero(ns);
    for (int i = 0; i < m; ++i) {
        const int bj = tab.basis[static_cast<std::size_t>(i)];
        if (bj < ns) z[bj] = tab.t(i, ncols);
        // A leftover basic artificial at level ~0 is a redundant row; if it
        // sits above feasibility tolerance the phase-1 test already failed.
    }
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x = lp.lo + z;
    sol.objective = lp.objective.dot(sol.x);
    return sol;
}

}  // namespace injectcheck
