#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "injectcheck/dss.hpp"
#include "injectcheck/errors.hpp"
#include "injectcheck/gaussian_study.hpp"
#include "injectcheck/linalg.hpp"

using namespace injectcheck;

namespace {

Eigen::MatrixXd from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows.begin()->size());
    Eigen::MatrixXd m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Eigen::MatrixXd pm_identity(int n) {
    Eigen::MatrixXd w(2 * n, n);
    w.topRows(n) = Eigen::MatrixXd::Identity(n, n);
    w.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
    return w;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

// Sampling oracle: count distinct strict sign patterns over many random
// directions. Resamples directions that graze a hyperplane.
std::size_t sampled_pattern_count(const Eigen::MatrixXd& w, int samples, Prng& prng) {
    std::set<std::vector<int>> patterns;
    for (int t = 0; t < samples; ++t) {
        const Eigen::VectorXd x = prng.unit_sphere(static_cast<int>(w.cols()));
        std::vector<int> sig;
        bool grazing = false;
        for (int j = 0; j < w.rows(); ++j) {
            const double ip = w.row(j).dot(x);
            if (std::abs(ip) < 1e-9 * w.row(j).norm()) {
                grazing = true;
                break;
            }
            sig.push_back(ip > 0 ? 1 : -1);
        }
        if (!grazing) patterns.insert(std::move(sig));
    }
    return patterns.size();
}

Eigen::VectorXd relu(const Eigen::VectorXd& v) { return v.cwiseMax(0.0); }

}  // namespace

TEST_CASE("active rows uses the inclusive convention") {
    CHECK(active_rows(Eigen::MatrixXd::Identity(2, 2), vec2(1, 1)) == IndexSet{0, 1});

    Eigen::VectorXd x(3);
    x << -1, 0, 0;
    CHECK(active_rows(Eigen::MatrixXd::Identity(3, 3), x) == IndexSet{1, 2});

    const Eigen::MatrixXd w = from_rows({{1, 0}, {0, 1}, {-1, -1}});
    CHECK(active_rows(w, vec2(-1, -0.5)) == IndexSet{2});

    CHECK_THROWS_AS(active_rows(w, Eigen::VectorXd::Ones(3)), DimensionError);
}

TEST_CASE("has_dss_at on the reference points") {
    const Eigen::MatrixXd pm2 = pm_identity(2);
    Prng prng(5);
    for (int t = 0; t < 50; ++t) CHECK(has_dss_at(pm2, prng.unit_sphere(2)));

    Eigen::VectorXd x(3);
    x << -1, 0, 0;
    CHECK_FALSE(has_dss_at(Eigen::MatrixXd::Identity(3, 3), x));

    CHECK_FALSE(has_dss_at(from_rows({{1, 0}, {0, 1}, {-1, -1}}), vec2(-1, -0.5)));
}

TEST_CASE("wedge enumeration: half planes and the generic counts") {
    {
        const auto cells = enumerate_wedges(from_rows({{1, 0}}));
        CHECK(cells.size() == 2);
    }
    Prng prng(17);
    {
        const Eigen::MatrixXd w = prng.gaussian_matrix(3, 2);
        const auto cells = enumerate_wedges(w);
        CHECK(cells.size() == 6);
        Prng oracle(18);
        CHECK(sampled_pattern_count(w, 100000, oracle) == cells.size());
    }
    {
        const Eigen::MatrixXd w = prng.gaussian_matrix(5, 3);
        const auto cells = enumerate_wedges(w);
        CHECK(cells.size() == 22);  // 2*(1+4+6)
        Prng oracle(19);
        CHECK(sampled_pattern_count(w, 100000, oracle) == cells.size());
    }
}

TEST_CASE("wedge cells carry valid distinct witnesses") {
    Prng prng(23);
    const Eigen::MatrixXd w = prng.gaussian_matrix(6, 3);
    const auto cells = enumerate_wedges(w);
    std::set<std::vector<int>> seen;
    for (const WedgeCell& cell : cells) {
        std::vector<int> sig(cell.sign_pattern.data(), cell.sign_pattern.data() + cell.sign_pattern.size());
        CHECK(seen.insert(sig).second);
        for (int j = 0; j < w.rows(); ++j) {
            const double ip = w.row(j).dot(cell.witness);
            CHECK(cell.sign_pattern[j] * ip > 0);
        }
    }
}

TEST_CASE("duplicate, antiparallel and zero rows share one hyperplane") {
    const Eigen::MatrixXd w = from_rows({{1, 0}, {2, 0}, {-3, 0}, {0, 0}});
    const auto en = enumerate_wedge_cells(w);
    CHECK(en.hyperplane_count == 1);
    CHECK(en.cells.size() == 2);
    for (const WedgeCell& cell : en.cells) {
        CHECK(cell.sign_pattern[3] == 1);  // zero row always active
        CHECK(cell.sign_pattern[0] == cell.sign_pattern[1]);
        CHECK(cell.sign_pattern[0] == -cell.sign_pattern[2]);
    }
}

TEST_CASE("budget cap raises and certify degrades to Inconclusive") {
    Prng prng(29);
    const Eigen::MatrixXd w = prng.gaussian_matrix(9, 3);
    WedgeOptions small;
    small.budget = 10;
    CHECK_THROWS_AS(enumerate_wedges(w, small), BudgetExceededError);

    CertifyOptions copts;
    copts.budget = 10;
    CHECK(certify_dss_all(w, copts).verdict == Verdict::Inconclusive);
}

TEST_CASE("certify_dss_all: plus-minus identity is injective") {
    const auto cert = certify_dss_all(pm_identity(2));
    CHECK(cert.verdict == Verdict::Injective);
    CHECK(cert.method == "antiparallel-pairing");
}

TEST_CASE("certify_dss_all: identity counterexample with canonical witness") {
    for (int n = 2; n <= 4; ++n) {
        const auto cert = certify_dss_all(Eigen::MatrixXd::Identity(n, n));
        REQUIRE(cert.verdict == Verdict::NonInjective);
        REQUIRE(cert.failing_witness.has_value());
        CHECK((*cert.failing_witness)[0] < 0);
        REQUIRE(cert.collision.has_value());
        const auto& [x1, x2] = *cert.collision;
        CHECK((relu(x1) - relu(x2)).norm() <= tol::kTauCollide);
        CHECK((x1 - x2).norm() >= 10 * tol::kTauCollide);
    }
}

TEST_CASE("certify_dss_all: one-label wedge configuration is falsified") {
    // Four directions spread over a half plane leave the opposite cone with
    // no active rows and single-label wedges at the flanks.
    const double a1 = 0.2, a2 = 0.7, a3 = 0.9, a4 = 1.4;
    const Eigen::MatrixXd w = from_rows({{std::cos(a1), std::sin(a1)},
                                         {std::cos(a2), std::sin(a2)},
                                         {std::cos(a3), std::sin(a3)},
                                         {std::cos(a4), std::sin(a4)}});
    const auto cert = certify_dss_all(w);
    REQUIRE(cert.verdict == Verdict::NonInjective);
    const auto& [x1, x2] = *cert.collision;
    CHECK((relu(w * x1) - relu(w * x2)).norm() <= tol::kTauCollide);
    CHECK((x1 - x2).norm() >= 1e-6);
}

TEST_CASE("verdicts are invariant under positive row rescaling") {
    Prng prng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(prng.next_u64() % 2);
        const int m = n + static_cast<int>(prng.next_u64() % (2 * n));
        Eigen::MatrixXd w = prng.gaussian_matrix(m, n);
        const auto before = certify_dss_all(w);
        Eigen::MatrixXd scaled = w;
        for (int j = 0; j < m; ++j) scaled.row(j) *= 0.1 + 3.0 * prng.uniform01();
        const auto after = certify_dss_all(scaled);
        CHECK(before.verdict == after.verdict);
        if (before.verdict != Verdict::Inconclusive && before.method == after.method &&
            before.method == "wedge-enumeration")
            CHECK(before.wedge_count == after.wedge_count);
    }
}

TEST_CASE("full spark plus n active rows per wedge implies injectivity") {
    Prng prng(37);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2;
        const int m = 5 + static_cast<int>(prng.next_u64() % 3);
        // Random Gaussian rows are almost surely full spark; verify it.
        const Eigen::MatrixXd w = prng.gaussian_matrix(m, n);
        bool full_spark = true;
        for (int i = 0; i < m && full_spark; ++i)
            for (int j = i + 1; j < m && full_spark; ++j) {
                Eigen::MatrixXd pair(2, n);
                pair << w.row(i), w.row(j);
                if (rank(pair) < 2) full_spark = false;
            }
        if (!full_spark) continue;
        const auto cells = enumerate_wedges(w);
        const bool all_big = std::all_of(cells.begin(), cells.end(), [&](const WedgeCell& c) {
            return static_cast<int>(c.active.size()) >= n;
        });
        if (all_big) CHECK(certify_dss_all(w).verdict == Verdict::Injective);
    }
}

TEST_CASE("inclusivity monotonicity: crossing points absorb the active set") {
    // Along any segment, the active set at a sign-crossing contains the
    // active set just before it: rows can only leave by passing through 0.
    Prng prng(43);
    const Eigen::MatrixXd w = prng.gaussian_matrix(5, 3);
    for (int rep = 0; rep < 40; ++rep) {
        const Eigen::VectorXd a = prng.unit_sphere(3);
        const Eigen::VectorXd b = prng.unit_sphere(3);
        for (int j = 0; j < w.rows(); ++j) {
            const double va = w.row(j).dot(a);
            const double vb = w.row(j).dot(b);
            if (va * vb >= 0) continue;
            const double t = va / (va - vb);
            const Eigen::VectorXd crossing = a + t * (b - a);
            const Eigen::VectorXd before = a + (t - 1e-7) * (b - a);
            const IndexSet sc = active_rows(w, crossing);
            for (int idx : active_rows(w, before))
                CHECK(std::find(sc.begin(), sc.end(), idx) != sc.end());
        }
    }
}

TEST_CASE("falsify_random finds identity failures and respects injectivity") {
    {
        Prng prng(47);
        const auto hit = falsify_random(Eigen::MatrixXd::Identity(3, 3), 1000, prng);
        REQUIRE(hit.has_value());
        CHECK_FALSE(has_dss_at(Eigen::MatrixXd::Identity(3, 3), *hit));
    }
    {
        Prng prng(53);
        CHECK_FALSE(falsify_random(pm_identity(2), 500, prng).has_value());
    }
    {
        // Underexpansive Gaussian layers fail fast at n = 20, c = 2.1.
        int found = 0;
        for (int seed = 0; seed < 10; ++seed) {
            Prng prng(900 + seed);
            const Eigen::MatrixXd w = prng.gaussian_matrix(42, 20);
            Prng search(1900 + seed);
            if (falsify_random(w, 1000, search).has_value()) ++found;
        }
        CHECK(found >= 9);
    }
}

TEST_CASE("falsify_random agrees with exact certification") {
    Prng prng(59);
    for (int trial = 0; trial < 15; ++trial) {
        const int n = 2;
        const int m = 2 + static_cast<int>(prng.next_u64() % 4);
        const Eigen::MatrixXd w = prng.gaussian_matrix(m, n);
        Prng search(60 + trial);
        const auto hit = falsify_random(w, 400, search);
        const auto cert = certify_dss_all(w);
        if (hit.has_value()) CHECK(cert.verdict == Verdict::NonInjective);
        if (cert.verdict == Verdict::Injective) CHECK_FALSE(hit.has_value());
    }
}

TEST_CASE("orthant certification") {
    for (int n = 2; n <= 4; ++n) {
        CHECK(certify_dss_orthant(Eigen::MatrixXd::Identity(n, n)).verdict == Verdict::Injective);
        const auto cert = certify_dss_orthant(-Eigen::MatrixXd::Identity(n, n));
        REQUIRE(cert.verdict == Verdict::NonInjective);
        const auto& [x1, x2] = *cert.collision;
        CHECK(x1.minCoeff() >= -1e-12);
        CHECK(x2.minCoeff() >= -1e-12);
    }
    {
        const auto cert = certify_dss_orthant(from_rows({{1, -1}}));
        REQUIRE(cert.verdict == Verdict::NonInjective);
        const auto& [x1, x2] = *cert.collision;
        const Eigen::MatrixXd w = from_rows({{1, -1}});
        CHECK((relu(w * x1) - relu(w * x2)).norm() <= tol::kTauCollide);
        CHECK(x1.minCoeff() >= -1e-12);
        CHECK(x2.minCoeff() >= -1e-12);
    }
}

TEST_CASE("certified injectivity implies no random collisions") {
    Prng prng(61);
    const Eigen::MatrixXd w = pm_identity(3);
    REQUIRE(certify_dss_all(w).verdict == Verdict::Injective);
    for (int t = 0; t < 10000; ++t) {
        const Eigen::VectorXd x = prng.normal_vector(3);
        const Eigen::VectorXd y = prng.normal_vector(3);
        if ((relu(w * x) - relu(w * y)).norm() <= tol::kTauCollide)
            CHECK((x - y).norm() <= 10 * tol::kTauCollide);
    }
}

TEST_CASE("enumeration count matches the closed form on Gaussian instances") {
    Prng prng(67);
    for (int n = 1; n <= 3; ++n) {
        for (int m = 1; m <= 6; ++m) {
            for (int rep = 0; rep < 5; ++rep) {
                const Eigen::MatrixXd w = prng.gaussian_matrix(m, n);
                CHECK(enumerate_wedges(w).size() == wedge_count_formula(m, n));
            }
        }
    }
}
