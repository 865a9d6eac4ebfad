#include "injectcheck/gaussian_study.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "injectcheck/dss.hpp"
#include "injectcheck/errors.hpp"
#include "injectcheck/matrix_io.hpp"

namespace injectcheck {

namespace {

using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

double binary_entropy(double e) {
    if (e <= 0.0 || e >= 1.0) return 0.0;
    return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

}  // namespace

double halfspace_probability_exact(int k, int n) {
    if (k < 1 || n < 1) throw DimensionError("halfspace_probability_exact: k, n >= 1");
    BigInt num = 0;
    for (int i = 0; i <= n - 1 && i <= k - 1; ++i) num += binomial(k - 1, i);
    BigInt den = BigInt(1) << (k - 1);
    // Exact rational reduced to double at the end.
    boost::multiprecision::cpp_rational p(num, den);
    return p.convert_to<double>();
}

double union_bound_exponent(double c) {
    if (!(c > 1.0)) throw DimensionError("union_bound_exponent: c > 1 required");
    return -std::log2(c * std::exp(1.0)) - (c - 1.0) * (binary_entropy(1.0 / (c - 1.0)) - 1.0);
}

double union_bound_threshold() {
    double lo = 2.0, hi = 64.0;
    // exponent is negative at lo and positive at hi; bisect the crossing.
    for (int it = 0; it < 200 && hi - lo > 1e-3; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (union_bound_exponent(mid) > 0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double cstar_lower_solve() {
    const auto f = [](double c) { return 0.5 * std::erfc(1.0 / std::sqrt(2.0 * c)) - 1.0 / c; };
    double lo = 1.0, hi = 10.0;  // f(1) < 0 < f(10)
    for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::uint64_t wedge_count_formula(int m, int n) {
    if (m < 1 || n < 1) throw DimensionError("wedge_count_formula: m, n >= 1");
    BigInt total = 0;
    for (int i = 0; i <= n - 1 && i <= m - 1; ++i) total += binomial(m - 1, i);
    total *= 2;
    if (total > BigInt(std::numeric_limits<std::uint64_t>::max()))
        throw std::overflow_error("wedge_count_formula: result exceeds uint64");
    return total.convert_to<std::uint64_t>();
}

Eigen::VectorXd mean_direction_point(const Eigen::MatrixXd& w) {
    validate_matrix(w, "mean_direction_point");
    const int m = static_cast<int>(w.rows());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(w.cols());
    for (int j = 0; j < m; ++j) {
        const double nrm = w.row(j).norm();
        if (nrm <= tol::kZeroRow) throw ZeroRowError("mean_direction_test: zero row");
        x -= w.row(j).transpose() / nrm;
    }
    return x / m;
}

int mean_direction_test(const Eigen::MatrixXd& w) {
    const Eigen::VectorXd xbar = mean_direction_point(w);
    return static_cast<int>(active_rows(w, xbar).size());
}

ExpansivityStudy run_expansivity_study(int n, const std::vector<double>& c_grid, int trials,
                                       std::uint64_t seed, const StudyOptions& opts) {
    if (n < 1) throw DimensionError("run_expansivity_study: n >= 1");
    if (trials < 1) throw DimensionError("run_expansivity_study: trials >= 1");

    ExpansivityStudy study;
    study.n = n;
    study.trials = trials;
    study.seed = seed;

    struct TrialOut {
        int active = 0;
        bool dss = false;
        int exact = -1;  // -1 skipped/undecided, 0 non-injective, 1 injective
    };

    for (std::size_t ci = 0; ci < c_grid.size(); ++ci) {
        const double c = c_grid[ci];
        const int m = static_cast<int>(std::llround(c * n));
        if (m < 1) throw DimensionError("run_expansivity_study: c*n rounds below 1");

        std::vector<TrialOut> outs(static_cast<std::size_t>(trials));
        const auto run_trial = [&](int t) {
            Prng prng(seed, static_cast<std::uint64_t>(ci) * trials + static_cast<std::uint64_t>(t));
            const Eigen::MatrixXd w = prng.gaussian_matrix(m, n);
            const Eigen::VectorXd xbar = mean_direction_point(w);
            TrialOut& o = outs[static_cast<std::size_t>(t)];
            o.active = static_cast<int>(active_rows(w, xbar).size());
            o.dss = has_dss_at(w, xbar);
            if (n <= opts.exact_dim_cap) {
                CertifyOptions copts;
                copts.budget = opts.budget;
                const InjectivityCertificate cert = certify_dss_all(w, copts);
                if (cert.verdict == Verdict::Injective)
                    o.exact = 1;
                else if (cert.verdict == Verdict::NonInjective)
                    o.exact = 0;
            }
        };

        const int workers = std::max(1, opts.threads);
        if (workers == 1) {
            for (int t = 0; t < trials; ++t) run_trial(t);
        } else {
            std::vector<std::thread> pool;
            for (int wi = 0; wi < workers; ++wi) {
                pool.emplace_back([&, wi]() {
                    for (int t = wi; t < trials; t += workers) run_trial(t);
                });
            }
            for (auto& th : pool) th.join();
        }

        ExpansivityRow row;
        row.c = c;
        row.m = m;
        long long active_sum = 0;
        int dss_count = 0, exact_inj = 0, exact_decided = 0;
        for (const TrialOut& o : outs) {
            active_sum += o.active;
            dss_count += o.dss ? 1 : 0;
            if (o.exact >= 0) {
                ++exact_decided;
                exact_inj += o.exact;
            }
        }
        row.mean_active_count = static_cast<double>(active_sum) / trials;
        row.dss_at_mean_freq = static_cast<double>(dss_count) / trials;
        if (exact_decided > 0)
            row.exact_injective_freq = static_cast<double>(exact_inj) / exact_decided;
        study.rows.push_back(row);
    }
    return study;
}

void write_study_csv(std::ostream& out, const ExpansivityStudy& study) {
    out << "c,mean_active_count,dss_at_mean_freq,exact_injective_freq\n";
    for (const ExpansivityRow& r : study.rows) {
        out << format_double(r.c) << ',' << format_double(r.mean_active_count) << ','
            << format_double(r.dss_at_mean_freq) << ',';
        if (r.exact_injective_freq) out << format_double(*r.exact_injective_freq);
        out << '\n';
    }
}

}  // namespace injectcheck
