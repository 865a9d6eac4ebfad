#pragma once

#include <Eigen/Dense>
#include <optional>

#include "injectcheck/certificate.hpp"
#include "injectcheck/matrix_io.hpp"
#include "injectcheck/prng.hpp"
#include "injectcheck/tolerances.hpp"
#include "injectcheck/wedges.hpp"

namespace injectcheck {

// S(x, W) with the inclusive convention: zero inner products (and zero rows)
// are members. 0-based indices.
IndexSet active_rows(const Eigen::MatrixXd& w, const Eigen::VectorXd& x);

// True iff the rows active at x span the full input space.
bool has_dss_at(const Eigen::MatrixXd& w, const Eigen::VectorXd& x);

struct CertifyOptions {
    std::size_t budget = tol::kDefaultWedgeBudget;
    double rank_tol = tol::kRank;
    bool record_evidence = false;
};

// Global check: injective iff every wedge's active rows span. A failing
// wedge yields the constructive collision (x, x + alpha x_perp) with x_perp
// in the kernel of the active rows and alpha halving the safe step.
InjectivityCertificate certify_dss_all(const Eigen::MatrixXd& w, const CertifyOptions& opts = {});

// Same question quantified over the closed nonnegative orthant only.
InjectivityCertificate certify_dss_orthant(const Eigen::MatrixXd& w, const CertifyOptions& opts = {});

// Cheap randomized screen: first sphere sample without a DSS, else nullopt.
// Absence is not a certificate.
std::optional<Eigen::VectorXd> falsify_random(const Eigen::MatrixXd& w, int trials, Prng& prng);

// Rows admitting an antiparallel partner span the space: the constructive
// sufficient condition behind the [B; -DB; M] family. Used as a fast path
// by the certifiers and exposed for structure tests.
bool antiparallel_pairing_spans(const Eigen::MatrixXd& w, double rank_tol = tol::kRank);

}  // namespace injectcheck
