#include "injectcheck/dss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "injectcheck/errors.hpp"
#include "injectcheck/linalg.hpp"

namespace injectcheck {

namespace {

Eigen::VectorXd relu(const Eigen::VectorXd& v) { return v.cwiseMax(0.0); }

Eigen::MatrixXd rows_subset(const Eigen::MatrixXd& w, const IndexSet& rows) {
    Eigen::MatrixXd s(static_cast<Eigen::Index>(rows.size()), w.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) s.row(static_cast<Eigen::Index>(i)) = w.row(rows[i]);
    return s;
}

int active_rank(const Eigen::MatrixXd& w, const IndexSet& act, double rank_tol) {
    if (act.empty()) return 0;
    return rank(rows_subset(w, act), rank_tol);
}

// Lexicographic order on sign patterns with -1 < +1.
bool pattern_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (a[j] != b[j]) return a[j] < b[j];
    }
    return false;
}

struct CollisionBuild {
    bool ok = false;
    Eigen::VectorXd witness;
    Eigen::VectorXd x1, x2;
};

// Thm.-1 style collision from a failing wedge: x stays, x + alpha x_perp
// keeps every inactive row negative and every active row untouched.
// orthant = true additionally keeps both points componentwise nonnegative.
CollisionBuild build_collision(const Eigen::MatrixXd& w, const WedgeCell& cell, double rank_tol,
                               bool orthant) {
    CollisionBuild out;
    const int n = static_cast<int>(w.cols());
    Eigen::VectorXd x = cell.witness;
    const double xn = x.norm();
    if (xn <= 0) return out;
    x /= xn;

    Eigen::VectorXd xperp;
    if (cell.active.empty()) {
        xperp = x;  // every row strictly negative: move along the ray
    } else {
        auto ns = nullspace_vector(rows_subset(w, cell.active), rank_tol);
        if (!ns) return out;
        xperp = *ns;
    }

    const auto alpha_for = [&](const Eigen::VectorXd& dir) {
        double alpha = std::numeric_limits<double>::infinity();
        for (int j = 0; j < w.rows(); ++j) {
            if (cell.sign_pattern[j] > 0) continue;  // active rows: exact kernel
            const double num = -w.row(j).dot(x);
            const double den = std::abs(w.row(j).dot(dir));
            if (den > 1e-14 * std::max(1.0, w.row(j).norm())) alpha = std::min(alpha, num / den);
        }
        if (orthant) {
            for (int i = 0; i < n; ++i) {
                if (dir[i] < -1e-14) alpha = std::min(alpha, x[i] / (-dir[i]));
            }
        }
        return alpha;
    };

    double a_plus = alpha_for(xperp);
    double a_minus = alpha_for(-xperp);
    Eigen::VectorXd dir = xperp;
    double alpha = a_plus;
    if (a_minus > a_plus) {
        dir = -xperp;
        alpha = a_minus;
    }
    alpha = std::isinf(alpha) ? 1.0 : 0.5 * alpha;
    if (!(alpha > 0)) return out;

    // Rescale so the separation clears the verification floor.
    double lambda = 1.0;
    if (alpha < 1e-6) lambda = std::min(1e6, 1e-6 / alpha);
    out.witness = lambda * x;
    out.x1 = out.witness;
    out.x2 = lambda * (x + alpha * dir);

    const Eigen::VectorXd y1 = relu(w * out.x1);
    const Eigen::VectorXd y2 = relu(w * out.x2);
    const double dy = (y1 - y2).norm();
    const double dx = (out.x1 - out.x2).norm();
    out.ok = dy <= tol::kTauCollide && dx >= 10 * tol::kTauCollide;
    if (orthant && out.ok)
        out.ok = out.x1.minCoeff() >= -1e-12 && out.x2.minCoeff() >= -1e-12;
    return out;
}

InjectivityCertificate certify_impl(const Eigen::MatrixXd& w, const CertifyOptions& opts, bool orthant) {
    validate_matrix(w, "certify_dss");
    const int n = static_cast<int>(w.cols());

    InjectivityCertificate cert;

    if (!orthant && antiparallel_pairing_spans(w, opts.rank_tol)) {
        cert.verdict = Verdict::Injective;
        cert.method = "antiparallel-pairing";
        return cert;
    }

    WedgeOptions wopts;
    wopts.budget = opts.budget;
    wopts.orthant_only = orthant;
    WedgeEnumeration en;
    try {
        en = enumerate_wedge_cells(w, wopts);
    } catch (const BudgetExceededError& e) {
        cert.verdict = Verdict::Inconclusive;
        cert.method = "wedge-enumeration";
        cert.wedge_count = e.partial_count;
        cert.note = "wedge budget exceeded";
        return cert;
    }

    cert.method = "wedge-enumeration";
    cert.wedge_count = en.cells.size();
    if (opts.record_evidence) cert.evidence.emplace();

    const WedgeCell* worst = nullptr;
    std::vector<const WedgeCell*> failing;
    for (const WedgeCell& cell : en.cells) {
        const int r = active_rank(w, cell.active, opts.rank_tol);
        if (opts.record_evidence) cert.evidence->push_back({cell.sign_pattern, r});
        if (r < n) {
            failing.push_back(&cell);
            if (!worst || pattern_less(cell.sign_pattern, worst->sign_pattern)) worst = &cell;
        }
    }

    if (failing.empty()) {
        if (en.uncertain) {
            cert.verdict = Verdict::Inconclusive;
            cert.note = "thin cells could not be decided";
        } else {
            cert.verdict = Verdict::Injective;
        }
        return cert;
    }

    // Canonical failing wedge first, then the rest until one verifies.
    std::vector<const WedgeCell*> order;
    order.push_back(worst);
    for (const WedgeCell* c : failing)
        if (c != worst) order.push_back(c);
    for (const WedgeCell* c : order) {
        const CollisionBuild cb = build_collision(w, *c, opts.rank_tol, orthant);
        if (cb.ok) {
            cert.verdict = Verdict::NonInjective;
            cert.failing_witness = cb.witness;
            cert.collision = std::make_pair(cb.x1, cb.x2);
            return cert;
        }
    }
    cert.verdict = Verdict::Inconclusive;
    cert.note = "failing wedge found but collision verification failed";
    cert.failing_witness = order.front()->witness;
    return cert;
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Injective: return "Injective";
        case Verdict::NonInjective: return "NonInjective";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

IndexSet active_rows(const Eigen::MatrixXd& w, const Eigen::VectorXd& x) {
    validate_matrix(w, "active_rows");
    if (x.size() != w.cols()) throw DimensionError("active_rows: dim(x) != cols(W)");
    IndexSet s;
    const double xn = x.norm();
    for (int j = 0; j < w.rows(); ++j) {
        const double ip = w.row(j).dot(x);
        if (ip >= -1e-13 * w.row(j).norm() * xn) s.push_back(j);
    }
    return s;
}

bool has_dss_at(const Eigen::MatrixXd& w, const Eigen::VectorXd& x) {
    const IndexSet s = active_rows(w, x);
    const int n = static_cast<int>(w.cols());
    if (static_cast<int>(s.size()) < n) return false;
    return active_rank(w, s, tol::kRank) == n;
}

bool antiparallel_pairing_spans(const Eigen::MatrixXd& w, double rank_tol) {
    const int m = static_cast<int>(w.rows());
    const int n = static_cast<int>(w.cols());
    double max_norm = 0.0;
    for (int j = 0; j < m; ++j) max_norm = std::max(max_norm, w.row(j).norm());
    if (max_norm <= 0.0) return false;

    std::vector<Eigen::VectorXd> units;
    units.reserve(static_cast<std::size_t>(m));
    std::vector<int> idx;
    for (int j = 0; j < m; ++j) {
        const double nrm = w.row(j).norm();
        if (nrm <= tol::kZeroRow * max_norm) continue;
        units.push_back(w.row(j).transpose() / nrm);
        idx.push_back(j);
    }
    std::vector<Eigen::VectorXd> lines;
    for (std::size_t a = 0; a < units.size(); ++a) {
        for (std::size_t b = a + 1; b < units.size(); ++b) {
            if ((units[a] + units[b]).norm() <= tol::kAntiparallel) {
                bool fresh = true;
                for (const auto& l : lines)
                    if ((l - units[a]).norm() <= tol::kAntiparallel || (l + units[a]).norm() <= tol::kAntiparallel) {
                        fresh = false;
                        break;
                    }
                if (fresh) lines.push_back(units[a]);
                break;
            }
        }
    }
    if (static_cast<int>(lines.size()) < n) return false;
    Eigen::MatrixXd l(static_cast<Eigen::Index>(lines.size()), n);
    for (std::size_t i = 0; i < lines.size(); ++i) l.row(static_cast<Eigen::Index>(i)) = lines[i].transpose();
    return rank(l, rank_tol) == n;
}

InjectivityCertificate certify_dss_all(const Eigen::MatrixXd& w, const CertifyOptions& opts) {
    return certify_impl(w, opts, /*orthant=*/false);
}

InjectivityCertificate certify_dss_orthant(const Eigen::MatrixXd& w, const CertifyOptions& opts) {
    return certify_impl(w, opts, /*orthant=*/true);
}

std::optional<Eigen::VectorXd> falsify_random(const Eigen::MatrixXd& w, int trials, Prng& prng) {
    validate_matrix(w, "falsify_random");
    if (trials < 1) throw DimensionError("falsify_random: trials >= 1 required");
    const int n = static_cast<int>(w.cols());
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd x = prng.unit_sphere(n);
        if (!has_dss_at(w, x)) return x;
    }
    return std::nullopt;
}

}  // namespace injectcheck
