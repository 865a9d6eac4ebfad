#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "injectcheck/certificate.hpp"
#include "injectcheck/dense_layer.hpp"
#include "injectcheck/prng.hpp"
#include "injectcheck/tolerances.hpp"

namespace injectcheck {

struct ReluNetwork {
    std::vector<DenseLayer> layers;
    std::optional<Eigen::MatrixXd> final_linear;

    int in_dim() const;
    int out_dim() const;
};

void validate_network(const ReluNetwork& net);

Eigen::VectorXd forward(const ReluNetwork& net, const Eigen::VectorXd& z);

// One maximal open activation region: on it the network is the affine map
// x -> a x + c. Constraints are joint-unit-normalized rows of
// sign * (<g, x> + o) > 0; the witness satisfies them with margin

// >= delta_strict.
struct AffineRegion {
    std::vector<Eigen::VectorXi> activation_pattern;  // one entry per layer (empty for identity layers)
    Eigen::MatrixXd a;
    Eigen::VectorXd c;
    Eigen::VectorXd witness;
    Eigen::MatrixXd constraint_normals;  // rows: signed g
    Eigen::VectorXd constraint_offsets;  // signed o
};

struct RegionOptions {
    std::size_t budget = tol::kDefaultRegionBudget;
    double delta_strict = tol::kDeltaStrict;
};

struct RegionEnumeration {
    std::vector<AffineRegion> regions;
    bool uncertain = false;
};

// All realizable activation regions by recursive pattern refinement with
// feasibility pruning. Throws BudgetExceededError past the budget.
RegionEnumeration enumerate_region_cells(const ReluNetwork& net, const RegionOptions& opts = {});
std::vector<AffineRegion> enumerate_regions(const ReluNetwork& net,
                                            std::size_t budget = tol::kDefaultRegionBudget);

struct ExactCertifyOptions {
    std::size_t region_budget = tol::kDefaultRegionBudget;
    double delta_sep = tol::kDeltaSep;
    double collide_tol = tol::kTauCollide;
    int threads = 1;
};

// Exact end-to-end injectivity via region-pair feasibility: any two regions
// mapping separated points to one output give a verified collision; all
// pairs empty plus full per-region column rank certify injectivity.
InjectivityCertificate certify_exact(const ReluNetwork& net, const ExactCertifyOptions& opts = {});

// Sufficient layerwise check: Injective when every layer (and the optional
// final map) passes; anything else is Inconclusive, never NonInjective.
InjectivityCertificate certify_layerwise(const ReluNetwork& net, const CertifyOptions& opts = {});

// Randomized falsifier: sampling plus derivative-free coordinate descent on
// the squared output gap, keeping the pair at least 1e3*tol apart.
std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> collision_search(
    const ReluNetwork& net, int trials, Prng& prng, double tol_collide = tol::kTauCollide);

// Alternating injective ReLU blocks and random dimension-reducing
// projections. dims[0] is the input dimension; odd positions are block
// outputs (>= 2x the preceding dim), even positions >= 2 are projection
// outputs and must be >= 2*dims[0] + 1.
struct CascadeSpec {
    std::vector<int> dims;
    std::optional<std::vector<Eigen::MatrixXd>> projections;  // sampled if absent
};

ReluNetwork build_cascade(const CascadeSpec& spec, Prng& prng);

}  // namespace injectcheck
