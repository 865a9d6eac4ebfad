#include "injectcheck/stability.hpp"

#include <cmath>
#include <limits>

#include "injectcheck/errors.hpp"
#include "injectcheck/linalg.hpp"

namespace injectcheck {

namespace {

Eigen::VectorXd relu(const Eigen::VectorXd& v) { return v.cwiseMax(0.0); }

// sigma_min of W restricted to `act` as an m x n map (zero rows contribute
// nothing; fewer than n active rows means a kernel, i.e. sigma 0).
double sigma_active(const Eigen::MatrixXd& w, const IndexSet& act) {
    const int n = static_cast<int>(w.cols());
    if (static_cast<int>(act.size()) < n) return 0.0;
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(act.size()), n);
    for (std::size_t i = 0; i < act.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = w.row(act[i]);
    return smallest_singular_value(sub);
}

}  // namespace

StabilityReport inverse_lipschitz_exact(const Eigen::MatrixXd& w, const StabilityOptions& opts) {
    validate_matrix(w, "inverse_lipschitz_exact");
    StabilityReport report;
    report.m = static_cast<int>(w.rows());
    report.n = static_cast<int>(w.cols());

    CertifyOptions copts;
    copts.budget = opts.budget;
    copts.rank_tol = opts.rank_tol;
    const InjectivityCertificate cert = certify_dss_all(w, copts);
    if (cert.verdict == Verdict::NonInjective)
        throw NotInjectiveError("inverse_lipschitz_exact: layer is not injective");
    if (cert.verdict == Verdict::Inconclusive) return report;  // budget: exact field stays absent

    WedgeOptions wopts;
    wopts.budget = opts.budget;
    WedgeEnumeration en;
    try {
        en = enumerate_wedge_cells(w, wopts);
    } catch (const BudgetExceededError&) {
        return report;
    }
    double best = std::numeric_limits<double>::infinity();
    const WedgeCell* argmin = nullptr;
    for (const WedgeCell& cell : en.cells) {
        const double s = sigma_active(w, cell.active);
        if (s < best) {
            best = s;
            argmin = &cell;
        }
    }
    if (!argmin) return report;
    report.c_exact = best / std::sqrt(2.0 * report.m);
    report.argmin_pattern = argmin->sign_pattern;
    return report;
}

double inverse_lipschitz_sampled(const Eigen::MatrixXd& w, int trials, Prng& prng) {
    validate_matrix(w, "inverse_lipschitz_sampled");
    if (trials < 1) throw DimensionError("inverse_lipschitz_sampled: trials >= 1");
    const int m = static_cast<int>(w.rows());
    const int n = static_cast<int>(w.cols());
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXd x = prng.unit_sphere(n);
        best = std::min(best, sigma_active(w, active_rows(w, x)));
    }
    return best / std::sqrt(2.0 * m);
}

double empirical_min_ratio(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, int pairs, Prng& prng) {
    validate_matrix(w, "empirical_min_ratio");
    if (pairs < 1) throw DimensionError("empirical_min_ratio: pairs >= 1");
    const int n = static_cast<int>(w.cols());
    Eigen::VectorXd bias = b;
    if (bias.size() == 0) bias = Eigen::VectorXd::Zero(w.rows());
    if (bias.size() != w.rows()) throw DimensionError("empirical_min_ratio: bias length");

    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pairs; ++i) {
        const Eigen::VectorXd x0 = prng.unit_sphere(n);
        Eigen::VectorXd x1;
        if (i % 2 == 0) {
            const double r = std::exp(prng.uniform(std::log(1e-3), std::log(10.0)));
            x1 = x0 + r * prng.unit_sphere(n);
        } else {
            x1 = prng.unit_sphere(n);
        }
        const double dx = (x0 - x1).norm();
        if (dx < 1e-12) continue;
        const double dy = (relu(w * x0 + bias) - relu(w * x1 + bias)).norm();
        best = std::min(best, dy / dx);
    }
    return best;
}

bool colinear_additivity_check(const Eigen::MatrixXd& w, const Eigen::VectorXd& x1,
                               const Eigen::VectorXd& x2, const std::vector<double>& breakpoints) {
    validate_matrix(w, "colinear_additivity_check");
    if (x1.size() != w.cols() || x2.size() != w.cols())
        throw DimensionError("colinear_additivity_check: point dimension");
    const std::size_t nt = breakpoints.size();
    if (nt < 2 || std::abs(breakpoints.front()) > 1e-12 || std::abs(breakpoints.back() - 1.0) > 1e-12)
        throw DimensionError("colinear_additivity_check: breakpoints must run 0..1");
    for (std::size_t k = 1; k < nt; ++k)
        if (breakpoints[k] < breakpoints[k - 1])
            throw DimensionError("colinear_additivity_check: breakpoints must be sorted");

    std::vector<Eigen::VectorXd> y;
    y.reserve(nt);
    for (double t : breakpoints) y.push_back(relu(w * ((1.0 - t) * x1 + t * x2)));

    double sum_sq = 0.0, sum_norm = 0.0;
    for (std::size_t k = 0; k + 1 < nt; ++k) {
        const double d = (y[k] - y[k + 1]).norm();
        sum_sq += d * d;
        sum_norm += d;
    }
    const double total = (y.front() - y.back()).norm();
    const bool sq_ok = sum_sq <= total * total + tol::kTauNum;
    const bool norm_ok = sum_norm <= std::sqrt(static_cast<double>(nt)) * total + tol::kTauNum;
    return sq_ok && norm_ok;
}

}  // namespace injectcheck
