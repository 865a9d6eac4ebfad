#pragma once

#include <Eigen/Dense>

#include "injectcheck/certificate.hpp"
#include "injectcheck/dss.hpp"

namespace injectcheck {

enum class Activation { Relu, LeakyRelu, Identity };

struct DenseLayer {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;  // zero-length means all-zero bias
    Activation activation = Activation::Relu;
    double leaky_alpha = 0.1;  // slope in (0,1), LeakyRelu only

    int out_dim() const { return static_cast<int>(weight.rows()); }
    int in_dim() const { return static_cast<int>(weight.cols()); }
    Eigen::VectorXd bias_or_zero() const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

    static DenseLayer relu(Eigen::MatrixXd w, Eigen::VectorXd b = {});
    static DenseLayer linear(Eigen::MatrixXd w, Eigen::VectorXd b = {});
    static DenseLayer leaky(Eigen::MatrixXd w, double alpha, Eigen::VectorXd b = {});
};

void validate_layer(const DenseLayer& layer);

// W restricted to nonnegative-bias rows: rows with b_i >= 0 kept, rows with
// b_i < 0 zeroed. ReLU layers only.
Eigen::MatrixXd reduce_bias(const DenseLayer& layer);

// Layer injectivity. ReLU layers go through the bias reduction; a
// NonInjective result always carries a collision valid for the original
// biased layer (a scaling lift of the zero-bias collision, or a fallback to
// the exact piecewise-affine check when no lift exists).
InjectivityCertificate check_dense(const DenseLayer& layer, const CertifyOptions& opts = {});

// [B; -diag(d) B]: the minimally expansive injective family (m = 2n).
Eigen::MatrixXd construct_minimal(const Eigen::MatrixXd& basis, const Eigen::VectorXd& scales);

// [B; -diag(d) B; M] for arbitrary extra rows M: extra rows never remove a
// directed spanning set.
Eigen::MatrixXd construct_expanded(const Eigen::MatrixXd& basis, const Eigen::VectorXd& scales,
                                   const Eigen::MatrixXd& extra);

// False when m < 2n excludes injectivity outright; true means "not excluded".
bool minimal_expansivity_gate(int m, int n);

}  // namespace injectcheck
