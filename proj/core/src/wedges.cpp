#include "injectcheck/wedges.hpp"

#include <cmath>

#include "injectcheck/errors.hpp"
#include "injectcheck/lp.hpp"

namespace injectcheck {

namespace {

struct Hyperplane {
    Eigen::VectorXd normal;  // unit
    int fixed_sign = 0;      // +1 forces the positive side (orthant walls)
};

struct CellState {
    std::vector<std::int8_t> signs;  // per inserted hyperplane
    Eigen::VectorXd witness;
};

enum class SideAnswer { Nonempty, Empty, Uncertain };

struct SideResult {
    SideAnswer answer;
    Eigen::VectorXd witness;
};

// Margin of x against the cell constraints with `extra` appended.
double min_margin(const std::vector<Hyperplane>& hyps, const CellState& cell,
                  const Eigen::VectorXd& extra_normal, int extra_sign,
                  const Eigen::VectorXd& x) {
    double m = extra_sign * extra_normal.dot(x);
    for (std::size_t i = 0; i < cell.signs.size(); ++i)
        m = std::min(m, cell.signs[i] * hyps[i].normal.dot(x));
    return m;
}

// Does the open cone {sign_i <h_i, x> > 0} cut by `extra` have an interior
// point? Homogeneous, so the unit box search is complete.
SideResult side_interior(const std::vector<Hyperplane>& hyps, const CellState& cell,
                         const Eigen::VectorXd& extra_normal, int extra_sign,
                         double delta_strict) {
    const int n = static_cast<int>(extra_normal.size());
    const int k = static_cast<int>(cell.signs.size());

    LinearProgram lp;
    lp.A.resize(k + 1, n + 1);
    lp.b = Eigen::VectorXd::Zero(k + 1);
    for (int i = 0; i < k; ++i) {
        lp.A.row(i).head(n) = cell.signs[static_cast<std::size_t>(i)] * hyps[static_cast<std::size_t>(i)].normal.transpose();
        lp.A(i, n) = -1.0;
    }
    lp.A.row(k).head(n) = extra_sign * extra_normal.transpose();
    lp.A(k, n) = -1.0;
    lp.rel.assign(static_cast<std::size_t>(k + 1), LpRel::Ge);
    lp.objective = Eigen::VectorXd::Zero(n + 1);
    lp.objective[n] = 1.0;
    lp.lo = Eigen::VectorXd::Constant(n + 1, -1.0);
    lp.hi = Eigen::VectorXd::Constant(n + 1, 1.0);
    lp.lo[n] = 0.0;

    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) return {SideAnswer::Uncertain, {}};
    const double t = sol.x[n];
    if (t >= delta_strict) {
        Eigen::VectorXd x = sol.x.head(n);
        // The solver's margin is trusted only after direct re-verification.
        if (min_margin(hyps, cell, extra_normal, extra_sign, x) >= delta_strict / 2)
            return {SideAnswer::Nonempty, x};
        return {SideAnswer::Uncertain, {}};
    }
    if (t <= tol::kEmptyMargin) return {SideAnswer::Empty, {}};
    return {SideAnswer::Uncertain, {}};
}

// Cheap geometric candidates (reflection / nudge off the hyperplane) tried
// before falling back to the LP.
bool candidate_witness(const std::vector<Hyperplane>& hyps, const CellState& cell,
                       const Eigen::VectorXd& extra_normal, int extra_sign,
                       double delta_strict, Eigen::VectorXd& out) {
    const double d = extra_normal.dot(cell.witness);
    const Eigen::VectorXd on_plane = cell.witness - d * extra_normal;
    const double steps[] = {std::abs(d), 0.1, 0.01};
    for (double s : steps) {
        if (s <= 0) continue;
        Eigen::VectorXd cand = on_plane + extra_sign * s * extra_normal;
        const double mx = cand.cwiseAbs().maxCoeff();
        if (mx > 1.0) cand /= mx;
        if (min_margin(hyps, cell, extra_normal, extra_sign, cand) >= delta_strict) {
            out = cand;
            return true;
        }
    }
    return false;
}

}  // namespace

WedgeEnumeration enumerate_wedge_cells(const Eigen::MatrixXd& w, const WedgeOptions& opts) {
    validate_matrix(w, "enumerate_wedges");
    const int m = static_cast<int>(w.rows());
    const int n = static_cast<int>(w.cols());

    double max_norm = 0.0;
    for (int j = 0; j < m; ++j) max_norm = std::max(max_norm, w.row(j).norm());

    // Map rows onto distinct hyperplanes; antiparallel duplicates share one.
    std::vector<Hyperplane> hyps;
    std::vector<int> row_hyp(static_cast<std::size_t>(m), -1);   // -1 for zero rows
    std::vector<int> row_orient(static_cast<std::size_t>(m), 0); // +-1

    if (opts.orthant_only) {
        for (int i = 0; i < n; ++i) {
            Hyperplane h;
            h.normal = Eigen::VectorXd::Unit(n, i);
            h.fixed_sign = +1;
            hyps.push_back(std::move(h));
        }
    }
    const std::size_t wall_count = hyps.size();

    for (int j = 0; j < m; ++j) {
        const double nrm = w.row(j).norm();
        if (max_norm <= 0.0 || nrm <= tol::kZeroRow * max_norm) continue;  // zero row: no hyperplane
        const Eigen::VectorXd u = w.row(j).transpose() / nrm;
        int found = -1, orient = 0;
        for (std::size_t h = 0; h < hyps.size(); ++h) {
            if ((u - hyps[h].normal).norm() <= tol::kAntiparallel) {
                found = static_cast<int>(h);
                orient = +1;
                break;
            }
            if ((u + hyps[h].normal).norm() <= tol::kAntiparallel) {
                found = static_cast<int>(h);
                orient = -1;
                break;
            }
        }
        if (found < 0) {
            Hyperplane h;
            h.normal = u;
            hyps.push_back(std::move(h));
            found = static_cast<int>(hyps.size()) - 1;
            orient = +1;
        }
        row_hyp[static_cast<std::size_t>(j)] = found;
        row_orient[static_cast<std::size_t>(j)] = orient;
    }

    WedgeEnumeration out;
    out.hyperplane_count = hyps.size() - wall_count;

    std::vector<CellState> cells;
    {
        CellState root;
        root.witness = Eigen::VectorXd::Zero(n);
        root.witness[0] = 1.0;  // arbitrary; refined on first insertion
        cells.push_back(std::move(root));
    }

    std::vector<Hyperplane> inserted;
    for (std::size_t k = 0; k < hyps.size(); ++k) {
        const Hyperplane& h = hyps[k];
        std::vector<CellState> next;
        next.reserve(cells.size() * 2);
        for (CellState& cell : cells) {
            const double d = h.normal.dot(cell.witness);
            if (h.fixed_sign != 0) {
                // Orthant wall: keep the forced side only.
                if (h.fixed_sign * d >= opts.delta_strict) {
                    cell.signs.push_back(static_cast<std::int8_t>(h.fixed_sign));
                    next.push_back(std::move(cell));
                } else {
                    Eigen::VectorXd cand;
                    if (candidate_witness(inserted, cell, h.normal, h.fixed_sign, opts.delta_strict, cand)) {
                        cell.signs.push_back(static_cast<std::int8_t>(h.fixed_sign));
                        cell.witness = std::move(cand);
                        next.push_back(std::move(cell));
                    } else {
                        const SideResult r = side_interior(inserted, cell, h.normal, h.fixed_sign, opts.delta_strict);
                        if (r.answer == SideAnswer::Nonempty) {
                            cell.signs.push_back(static_cast<std::int8_t>(h.fixed_sign));
                            cell.witness = r.witness;
                            next.push_back(std::move(cell));
                        } else if (r.answer == SideAnswer::Uncertain) {
                            out.uncertain = true;
                        }
                    }
                }
                continue;
            }

            const int near_side = (d >= 0) ? +1 : -1;
            bool have_near = std::abs(d) >= opts.delta_strict;
            Eigen::VectorXd near_witness = cell.witness;
            if (!have_near) {
                Eigen::VectorXd cand;
                if (candidate_witness(inserted, cell, h.normal, near_side, opts.delta_strict, cand)) {
                    near_witness = std::move(cand);
                    have_near = true;
                } else {
                    const SideResult r = side_interior(inserted, cell, h.normal, near_side, opts.delta_strict);
                    if (r.answer == SideAnswer::Nonempty) {
                        near_witness = r.witness;
                        have_near = true;
                    } else if (r.answer == SideAnswer::Uncertain) {
                        out.uncertain = true;
                    }
                }
            }

            const int far_side = -near_side;
            bool have_far = false;
            Eigen::VectorXd far_witness;
            {
                Eigen::VectorXd cand;
                if (candidate_witness(inserted, cell, h.normal, far_side, opts.delta_strict, cand)) {
                    far_witness = std::move(cand);
                    have_far = true;
                } else {
                    const SideResult r = side_interior(inserted, cell, h.normal, far_side, opts.delta_strict);
                    if (r.answer == SideAnswer::Nonempty) {
                        far_witness = r.witness;
                        have_far = true;
                    } else if (r.answer == SideAnswer::Uncertain) {
                        out.uncertain = true;
                    }
                }
            }

            if (have_near) {
                CellState c;
                c.signs = cell.signs;
                c.signs.push_back(static_cast<std::int8_t>(near_side));
                c.witness = std::move(near_witness);
                next.push_back(std::move(c));
            }
            if (have_far) {
                CellState c;
                c.signs = std::move(cell.signs);
                c.signs.push_back(static_cast<std::int8_t>(far_side));
                c.witness = std::move(far_witness);
                next.push_back(std::move(c));
            }
            if (next.size() > opts.budget)
                throw BudgetExceededError("wedge budget exceeded", next.size());
        }
        cells = std::move(next);
        inserted.push_back(h);
        if (cells.size() > opts.budget)
            throw BudgetExceededError("wedge budget exceeded", cells.size());
    }

    out.cells.reserve(cells.size());
    for (CellState& cell : cells) {
        WedgeCell wc;
        wc.sign_pattern.resize(m);
        wc.witness = std::move(cell.witness);
        for (int j = 0; j < m; ++j) {
            const int hj = row_hyp[static_cast<std::size_t>(j)];
            if (hj < 0) {
                wc.sign_pattern[j] = +1;  // zero rows are always active
            } else {
                wc.sign_pattern[j] =
                    row_orient[static_cast<std::size_t>(j)] * cell.signs[static_cast<std::size_t>(hj)];
            }
            if (wc.sign_pattern[j] > 0) wc.active.push_back(j);
        }
        out.cells.push_back(std::move(wc));
    }
    return out;
}

std::vector<WedgeCell> enumerate_wedges(const Eigen::MatrixXd& w, const WedgeOptions& opts) {
    return enumerate_wedge_cells(w, opts).cells;
}

}  // namespace injectcheck
