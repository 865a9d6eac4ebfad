#pragma once

#include <cstddef>

namespace injectcheck {

// Central numeric knobs. All comparisons against unit-normalized constraint
// rows unless stated otherwise.
namespace tol {

// Relative singular-value cutoff for numerical rank.
inline constexpr double kRank = 1e-9;

// Interior margin required of strict-inequality witnesses.
inline constexpr double kDeltaStrict = 1e-7;

// Witness re-verification slack for feasibility results.
inline constexpr double kTauFeas = 1e-8;

// Output-space tolerance for accepting a collision pair.
inline constexpr double kTauCollide = 1e-9;

// Absolute tolerance for stability / colinearity comparisons.
inline constexpr double kTauNum = 1e-8;

// Input-space carve-out between the pairwise collision search and the
// per-region rank check in the exact network certifier.
inline constexpr double kDeltaSep = 1e-4;

// Below this optimal margin a cell is treated as empty by the arrangement
// engine; between this and kDeltaStrict the decision is flagged uncertain.
inline constexpr double kEmptyMargin = 1e-11;

// Rows with norm below this count as zero rows.
inline constexpr double kZeroRow = 1e-13;

// Angular tolerance when matching antiparallel row pairs.
inline constexpr double kAntiparallel = 1e-10;

inline constexpr std::size_t kDefaultWedgeBudget = 1000000;
inline constexpr std::size_t kDefaultRegionBudget = 100000;

}  // namespace tol
}  // namespace injectcheck
