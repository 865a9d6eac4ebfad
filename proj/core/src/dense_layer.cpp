#include "injectcheck/dense_layer.hpp"

#include <cmath>
#include <limits>

#include "injectcheck/errors.hpp"
#include "injectcheck/linalg.hpp"
#include "injectcheck/network.hpp"

namespace injectcheck {

namespace {

Eigen::VectorXd relu_vec(const Eigen::VectorXd& v) { return v.cwiseMax(0.0); }

}  // namespace

Eigen::VectorXd DenseLayer::bias_or_zero() const {
    if (bias.size() == 0) return Eigen::VectorXd::Zero(weight.rows());
    return bias;
}

Eigen::VectorXd DenseLayer::apply(const Eigen::VectorXd& x) const {
    if (x.size() != weight.cols()) throw DimensionError("DenseLayer::apply: dimension mismatch");
    Eigen::VectorXd z = weight * x + bias_or_zero();
    switch (activation) {
        case Activation::Relu:
            return relu_vec(z);
        case Activation::LeakyRelu:
            return z.unaryExpr([a = leaky_alpha](double v) { return v >= 0 ? v : a * v; });
        case Activation::Identity:
            return z;
    }
    return z;
}

DenseLayer DenseLayer::relu(Eigen::MatrixXd w, Eigen::VectorXd b) {
    return DenseLayer{std::move(w), std::move(b), Activation::Relu, 0.1};
}

DenseLayer DenseLayer::linear(Eigen::MatrixXd w, Eigen::VectorXd b) {
    return DenseLayer{std::move(w), std::move(b), Activation::Identity, 0.1};
}

DenseLayer DenseLayer::leaky(Eigen::MatrixXd w, double alpha, Eigen::VectorXd b) {
    return DenseLayer{std::move(w), std::move(b), Activation::LeakyRelu, alpha};
}

void validate_layer(const DenseLayer& layer) {
    validate_matrix(layer.weight, "layer weight");
    if (layer.bias.size() != 0) {
        validate_vector(layer.bias, "layer bias");
        if (layer.bias.size() != layer.weight.rows())
            throw DimensionError("layer bias length != weight rows");
    }
    if (layer.activation == Activation::LeakyRelu &&
        !(layer.leaky_alpha > 0.0 && layer.leaky_alpha < 1.0))
        throw DimensionError("leaky slope must lie in (0,1)");
}

Eigen::MatrixXd reduce_bias(const DenseLayer& layer) {
    validate_layer(layer);
    if (layer.activation != Activation::Relu)
        throw DimensionError("reduce_bias: ReLU layers only");
    Eigen::MatrixXd v = layer.weight;
    const Eigen::VectorXd b = layer.bias_or_zero();
    for (int j = 0; j < v.rows(); ++j)
        if (b[j] < 0.0) v.row(j).setZero();
    return v;
}

namespace {

// Lift a zero-bias collision of the reduced matrix to the biased layer: find
// beta with
//   rows b_j <  0:                 <w_j, beta x> + b_j < 0 at both points
//   rows b_j >= 0, inactive at x:  <w_j, beta x> + b_j <= 0 at both points
// Active rows are untouched because x_perp lies in their kernel.
struct LiftResult {
    bool ok = false;
    Eigen::VectorXd x1, x2;
};

LiftResult lift_collision(const Eigen::MatrixXd& w, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& x2_unscaled) {
    LiftResult out;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    for (int j = 0; j < w.rows(); ++j) {
        const double a1 = w.row(j).dot(x);
        const double a2 = w.row(j).dot(x2_unscaled);
        if (b[j] < 0.0) {
            if (a1 > 0.0) upper = std::min(upper, -b[j] / a1);
            if (a2 > 0.0) upper = std::min(upper, -b[j] / a2);
        } else {
            // Only rows strictly negative at both points constrain from below;
            // active rows have a1 == a2 and cancel in the difference.
            if (a1 < -1e-14 && a2 < -1e-14) {
                lower = std::max(lower, b[j] / (-a1));
                lower = std::max(lower, b[j] / (-a2));
            } else if (std::abs(a1 - a2) > 1e-12 * std::max(1.0, w.row(j).norm())) {
                return out;  // row moved by the perturbation yet bias keeps it alive
            }
        }
    }
    if (!(lower < upper * (1.0 - 1e-9))) return out;
    double beta;
    if (std::isinf(upper)) {
        beta = std::max(1.0, 2.0 * lower);
    } else if (lower == 0.0) {
        beta = 0.5 * std::min(1.0, upper);
    } else {
        beta = std::sqrt(lower * upper);
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) return out;
    out.x1 = beta * x;
    out.x2 = beta * x2_unscaled;
    const Eigen::VectorXd y1 = relu_vec(w * out.x1 + b);
    const Eigen::VectorXd y2 = relu_vec(w * out.x2 + b);
    out.ok = (y1 - y2).norm() <= tol::kTauCollide &&
             (out.x1 - out.x2).norm() >= 10 * tol::kTauCollide;
    return out;
}

}  // namespace

InjectivityCertificate check_dense(const DenseLayer& layer, const CertifyOptions& opts) {
    validate_layer(layer);
    const int n = layer.in_dim();

    if (layer.activation != Activation::Relu) {
        // One-to-one activations: injective iff the weights have full column rank.
        InjectivityCertificate cert;
        cert.method = "full-column-rank";
        if (rank(layer.weight, opts.rank_tol) == n) {
            cert.verdict = Verdict::Injective;
            return cert;
        }
        auto v = nullspace_vector(layer.weight, opts.rank_tol);
        if (!v) {
            cert.verdict = Verdict::Inconclusive;
            return cert;
        }
        cert.verdict = Verdict::NonInjective;
        Eigen::VectorXd x1 = Eigen::VectorXd::Zero(n);
        cert.collision = std::make_pair(x1, *v);
        cert.failing_witness = *v;
        return cert;
    }

    const Eigen::MatrixXd reduced = reduce_bias(layer);
    const Eigen::VectorXd b = layer.bias_or_zero();
    InjectivityCertificate cert = certify_dss_all(reduced, opts);
    cert.method = "bias-reduction/" + cert.method;
    if (cert.verdict != Verdict::NonInjective) return cert;
    if (b.isZero(0.0)) return cert;  // collision already valid as-is

    // Re-derive failing wedges of the reduced matrix and lift each candidate
    // collision into the biased layer.
    WedgeOptions wopts;
    wopts.budget = opts.budget;
    WedgeEnumeration en;
    try {
        en = enumerate_wedge_cells(reduced, wopts);
    } catch (const BudgetExceededError&) {
        cert.verdict = Verdict::Inconclusive;
        cert.note = "wedge budget exceeded during bias lift";
        return cert;
    }
    for (const WedgeCell& cell : en.cells) {
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(cell.active.size()), n);
        for (std::size_t i = 0; i < cell.active.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = reduced.row(cell.active[i]);
        const int r = cell.active.empty() ? 0 : rank(sub, opts.rank_tol);
        if (r >= n) continue;

        Eigen::VectorXd x = cell.witness.normalized();
        Eigen::VectorXd xperp;
        if (cell.active.empty()) {
            xperp = x;
        } else {
            auto ns = nullspace_vector(sub, opts.rank_tol);
            if (!ns) continue;
            xperp = *ns;
        }
        double alpha = std::numeric_limits<double>::infinity();
        for (int j = 0; j < reduced.rows(); ++j) {
            if (cell.sign_pattern[j] > 0) continue;
            const double num = -reduced.row(j).dot(x);
            const double den = std::abs(reduced.row(j).dot(xperp));
            if (den > 1e-14 * std::max(1.0, reduced.row(j).norm())) alpha = std::min(alpha, num / den);
        }
        alpha = std::isinf(alpha) ? 1.0 : 0.5 * alpha;
        if (!(alpha > 0.0)) continue;

        const LiftResult lift = lift_collision(layer.weight, b, x, x + alpha * xperp);
        if (lift.ok) {
            InjectivityCertificate out;
            out.verdict = Verdict::NonInjective;
            out.method = "bias-reduction+lift";
            out.wedge_count = en.cells.size();
            out.failing_witness = lift.x1;
            out.collision = std::make_pair(lift.x1, lift.x2);
            return out;
        }
    }

    // No failing wedge lifts into the biased layer; the reduction is not
    // decisive here, so fall back to the exact piecewise-affine check.
    ReluNetwork single;
    single.layers.push_back(layer);
    ExactCertifyOptions eopts;
    eopts.region_budget = opts.budget;
    InjectivityCertificate exact = certify_exact(single, eopts);
    exact.method = "exact-regions-fallback";
    return exact;
}

Eigen::MatrixXd construct_minimal(const Eigen::MatrixXd& basis, const Eigen::VectorXd& scales) {
    validate_matrix(basis, "construct_minimal basis");
    const int n = static_cast<int>(basis.cols());
    if (basis.rows() != n) throw DimensionError("construct_minimal: basis must be square");
    if (scales.size() != n) throw DimensionError("construct_minimal: need one scale per row");
    if (rank(basis) < n) throw SingularBasisError("construct_minimal: basis is rank deficient");
    for (int i = 0; i < n; ++i)
        if (!(scales[i] > 0.0)) throw NonPositiveScaleError("construct_minimal: scales must be > 0");
    Eigen::MatrixXd w(2 * n, n);
    w.topRows(n) = basis;
    w.bottomRows(n) = -(scales.asDiagonal() * basis);
    if (!antiparallel_pairing_spans(w)) throw std::logic_error("construct_minimal: pairing certificate failed");
    return w;
}

Eigen::MatrixXd construct_expanded(const Eigen::MatrixXd& basis, const Eigen::VectorXd& scales,
                                   const Eigen::MatrixXd& extra) {
    Eigen::MatrixXd base = construct_minimal(basis, scales);
    if (extra.rows() == 0) return base;
    if (extra.cols() != basis.cols()) throw DimensionError("construct_expanded: extra rows have wrong width");
    if (!extra.allFinite()) throw DimensionError("construct_expanded: non-finite extra row");
    Eigen::MatrixXd w(base.rows() + extra.rows(), basis.cols());
    w << base, extra;
    return w;
}

bool minimal_expansivity_gate(int m, int n) {
    if (m < 1 || n < 1) throw DimensionError("minimal_expansivity_gate: m, n >= 1");
    // For n = 1 the same bound follows from needing one row on each side of
    // the origin, so the formula is uniform in n.
    return m >= 2 * n;
}

}  // namespace injectcheck
