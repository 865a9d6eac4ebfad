#include "doctest.h"

#include <cmath>

#include "injectcheck/dense_layer.hpp"
#include "injectcheck/errors.hpp"
#include "injectcheck/linalg.hpp"
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

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    int i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

Eigen::MatrixXd pm_identity(int n) {
    Eigen::MatrixXd w(2 * n, n);
    w.topRows(n) = Eigen::MatrixXd::Identity(n, n);
    w.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
    return w;
}

Eigen::MatrixXd random_orthogonal(int n, Prng& prng) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(prng.gaussian_matrix(n, n));
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    return q;
}

bool collision_checks_out(const DenseLayer& layer, const InjectivityCertificate& cert) {
    if (!cert.collision) return false;
    const auto& [x1, x2] = *cert.collision;
    return (layer.apply(x1) - layer.apply(x2)).norm() <= tol::kTauCollide &&
           (x1 - x2).norm() >= 10 * tol::kTauCollide;
}

}  // namespace

TEST_CASE("reduce_bias keeps nonnegative-bias rows and zeroes the rest") {
    const Eigen::MatrixXd w = from_rows({{1, 2}, {3, 4}});
    CHECK((reduce_bias(DenseLayer::relu(w)) - w).cwiseAbs().maxCoeff() == 0.0);
    CHECK((reduce_bias(DenseLayer::relu(w, vec({0.5, 2.0}))) - w).cwiseAbs().maxCoeff() == 0.0);

    const auto layer = DenseLayer::relu(from_rows({{1}, {-1}}), vec({-1, 0}));
    const Eigen::MatrixXd expected = from_rows({{0}, {-1}});
    CHECK((reduce_bias(layer) - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("check_dense on the reference layers") {
    CHECK(check_dense(DenseLayer::relu(pm_identity(2))).verdict == Verdict::Injective);

    {
        // ReLU(x-1), ReLU(-x): every x in [0,1] maps to (0,0).
        const auto layer = DenseLayer::relu(from_rows({{1}, {-1}}), vec({-1, 0}));
        const auto cert = check_dense(layer);
        REQUIRE(cert.verdict == Verdict::NonInjective);
        CHECK(collision_checks_out(layer, cert));
        const auto f = [&](double x) { return layer.apply(vec({x})); };
        CHECK((f(0.25) - f(0.75)).norm() == 0.0);
    }

    CHECK(check_dense(DenseLayer::leaky(Eigen::MatrixXd::Identity(2, 2), 0.1)).verdict ==
          Verdict::Injective);
    CHECK(check_dense(DenseLayer::linear(from_rows({{1, 1}, {2, 2}}))).verdict ==
          Verdict::NonInjective);
}

TEST_CASE("bias lift keeps the collision valid for the original layer") {
    Prng prng(71);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(prng.next_u64() % 3);
        const int m = 1 + static_cast<int>(prng.next_u64() % (2 * n));
        const Eigen::MatrixXd w = prng.gaussian_matrix(m, n);
        const Eigen::VectorXd b = prng.normal_vector(m);
        const auto layer = DenseLayer::relu(w, b);
        const auto cert = check_dense(layer);
        if (cert.verdict == Verdict::NonInjective) CHECK(collision_checks_out(layer, cert));
    }
}

TEST_CASE("bias equivalence holds whenever the reduction decides") {
    Prng prng(73);
    int reduction_used = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(prng.next_u64() % 3);
        const int m = 1 + static_cast<int>(prng.next_u64() % (3 * n));
        const Eigen::MatrixXd w = prng.gaussian_matrix(m, n);
        const Eigen::VectorXd b = prng.normal_vector(m);
        const auto layer = DenseLayer::relu(w, b);
        const auto cert = check_dense(layer);
        const auto reduced_cert = check_dense(DenseLayer::relu(reduce_bias(layer)));
        if (cert.method.rfind("bias-reduction", 0) == 0) {
            ++reduction_used;
            CHECK(cert.verdict == reduced_cert.verdict);
        } else {
            // The reduction refused to decide; the exact fallback must still
            // produce a sound answer.
            if (cert.verdict == Verdict::NonInjective) CHECK(collision_checks_out(layer, cert));
        }
    }
    CHECK(reduction_used > 150);
}

TEST_CASE("shifted split layer: reduction alone would overclaim") {
    // ReLU(x-1), ReLU(1-x) is injective although the reduced matrix [0; -1]
    // is not; the checker must detect that no collision lifts and recover.
    const auto layer = DenseLayer::relu(from_rows({{1}, {-1}}), vec({-1, 1}));
    const auto cert = check_dense(layer);
    CHECK(cert.verdict == Verdict::Injective);
    CHECK(cert.method == "exact-regions-fallback");
    const auto f = [&](double x) { return layer.apply(vec({x})); };
    for (double x = -3; x <= 3; x += 0.01)
        for (double y = x + 0.05; y <= 3; y += 0.25)
            CHECK((f(x) - f(y)).norm() > 1e-12);
}

TEST_CASE("construct_minimal: examples and guards") {
    const Eigen::MatrixXd w = construct_minimal(Eigen::MatrixXd::Identity(2, 2), vec({1, 1}));
    CHECK((w - pm_identity(2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(check_dense(DenseLayer::relu(w)).verdict == Verdict::Injective);

    Prng prng(79);
    const Eigen::MatrixXd q = random_orthogonal(3, prng);
    const Eigen::MatrixXd w2 = construct_minimal(q, vec({0.5, 2, 3}));
    CHECK(certify_dss_all(w2).verdict == Verdict::Injective);

    CHECK_THROWS_AS(construct_minimal(from_rows({{1, 1}, {1, 1}}), vec({1, 1})), SingularBasisError);
    CHECK_THROWS_AS(construct_minimal(Eigen::MatrixXd::Identity(2, 2), vec({1, 0})),
                    NonPositiveScaleError);
}

TEST_CASE("construct_expanded: extra rows never break injectivity") {
    Prng prng(83);
    {
        const Eigen::MatrixXd w =
            construct_expanded(Eigen::MatrixXd::Identity(2, 2), vec({1, 1}), Eigen::MatrixXd(0, 2));
        CHECK((w - pm_identity(2)).cwiseAbs().maxCoeff() == 0.0);
    }
    {
        const Eigen::MatrixXd w = construct_expanded(random_orthogonal(2, prng), vec({1, 2}),
                                                     prng.gaussian_matrix(1, 2));
        CHECK(certify_dss_all(w).verdict == Verdict::Injective);
    }
    {
        const Eigen::MatrixXd b = random_orthogonal(3, prng);
        const Eigen::MatrixXd w = construct_expanded(b, vec({1, 1, 1}), b);
        CHECK(certify_dss_all(w).verdict == Verdict::Injective);
    }
}

TEST_CASE("minimal expansivity gate") {
    CHECK_FALSE(minimal_expansivity_gate(3, 2));
    CHECK(minimal_expansivity_gate(4, 2));
    CHECK(minimal_expansivity_gate(21, 10));
    CHECK_FALSE(minimal_expansivity_gate(1, 1));
    CHECK(minimal_expansivity_gate(2, 1));
    CHECK_THROWS_AS(minimal_expansivity_gate(0, 1), DimensionError);
}

TEST_CASE("m < 2n layers always fail with a verified collision") {
    Prng prng(89);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(prng.next_u64() % 4);
        const int m = n + static_cast<int>(prng.next_u64() % n);  // n..2n-1 < 2n
        const Eigen::MatrixXd w = prng.gaussian_matrix(m, n);
        const auto layer = DenseLayer::relu(w);
        const auto cert = check_dense(layer);
        REQUIRE(cert.verdict == Verdict::NonInjective);
        CHECK(collision_checks_out(layer, cert));
    }
}

TEST_CASE("structure of certified minimal layers: rows pair up antiparallel") {
    Prng prng(97);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(prng.next_u64() % 3);
        Eigen::MatrixXd b = random_orthogonal(n, prng) * (0.5 + prng.uniform01());
        Eigen::VectorXd d(n);
        for (int i = 0; i < n; ++i) d[i] = 0.25 + 2 * prng.uniform01();
        Eigen::MatrixXd w = construct_minimal(b, d);
        for (int i = 2 * n - 1; i > 0; --i) {
            const int j = static_cast<int>(prng.next_u64() % (i + 1));
            w.row(i).swap(w.row(j));
        }
        REQUIRE(certify_dss_all(w).verdict == Verdict::Injective);
        // Pairwise angle search with tolerance 1e-6.
        for (int i = 0; i < w.rows(); ++i) {
            bool has_partner = false;
            for (int j = 0; j < w.rows() && !has_partner; ++j) {
                if (i == j) continue;
                const double cosine = w.row(i).dot(w.row(j)) / (w.row(i).norm() * w.row(j).norm());
                if (cosine < -1 + 1e-6) has_partner = true;
            }
            CHECK(has_partner);
        }
    }
}

TEST_CASE("leaky layers with full-rank weights certify for any slope") {
    Prng prng(101);
    for (double alpha : {0.01, 0.2, 0.9}) {
        const Eigen::MatrixXd w = prng.gaussian_matrix(3, 3);
        CHECK(check_dense(DenseLayer::leaky(w, alpha)).verdict == Verdict::Injective);
    }
}
