#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "injectcheck/certificate.hpp"
#include "injectcheck/dss.hpp"

namespace injectcheck {

// Multi-indices are p-tuples of positive integers compared componentwise.
using MultiIndex = std::vector<int>;

long long multi_index_count(const MultiIndex& shape);
bool multi_index_le(const MultiIndex& a, const MultiIndex& b);
bool multi_index_lt(const MultiIndex& a, const MultiIndex& b);

struct Kernel {
    MultiIndex width;        // O
    Eigen::VectorXd values;  // row-major over the width box
};

void validate_kernel(const Kernel& k);

enum class BoundaryMode { ZeroPadded, Periodic };

struct ConvSpec {
    std::vector<Kernel> kernels;
    MultiIndex signal_shape;  // N
    BoundaryMode boundary = BoundaryMode::ZeroPadded;
    int stride = 1;  // anything else is rejected
};

void validate_conv_spec(const ConvSpec& spec);

// Stacked convolution matrix [C_1; ...; C_nc] realizing
// (C x)_J = sum_{I=1..O} c_{O-I+1} x_{J+I-1} under the chosen boundary;
// out-of-range signal indices read zero (zero-padded) or wrap (periodic).
Eigen::MatrixXd conv_matrix(const ConvSpec& spec);

// All placements of the kernel inside the box P at offsets 0 <= D <= P - O,
// flattened row-major; empty for O not <= P. Ordered lexicographically in D.
std::vector<Eigen::VectorXd> padded_kernels(const Kernel& c, const MultiIndex& p);

// Sufficient convolutional test: if the union of zero-padded kernel
// families has a DSS of R^P for every direction, the layer is injective on
// any signal of size >= P. Failure at this P is only Inconclusive.
InjectivityCertificate check_conv(const std::vector<Kernel>& kernels, const MultiIndex& p,
                                  const CertifyOptions& opts = {});

// Smallest P (by box volume, ties lexicographic) up to p_max that certifies.
std::optional<std::pair<MultiIndex, InjectivityCertificate>> search_padding(
    const std::vector<Kernel>& kernels, const MultiIndex& p_max, const CertifyOptions& opts = {});

// Kernel-count convenience bound ceil(2 prod 1/(1 - O_j/P_j)); requires O < P.
long long min_channels(const MultiIndex& o, const MultiIndex& p);

// Exact vector-count requirement: smallest nc with
// nc * prod(P_j - O_j + 1) >= 2 prod P_j.
long long min_channels_count_bound(const MultiIndex& o, const MultiIndex& p);

// base kernels plus, for each, -s_k^2 * c_k: the injective filter family.
std::vector<Kernel> construct_pm_filters(const std::vector<Kernel>& base,
                                         const std::vector<double>& scales);

// Validation path: run the global DSS certification directly on the full
// convolution matrix (small signals only).
InjectivityCertificate cross_check_full(const ConvSpec& spec, const CertifyOptions& opts = {});

}  // namespace injectcheck
