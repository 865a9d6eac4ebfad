#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace injectcheck {

enum class Verdict { Injective, NonInjective, Inconclusive };

const char* to_string(Verdict v);

struct WedgeRankRecord {
    Eigen::VectorXi sign_pattern;
    int rank = 0;
};

// Tri-state result with evidence. NonInjective always carries a collision
// pair that re-verifies by direct evaluation; Injective names the mechanism
// that certified it.
struct InjectivityCertificate {
    Verdict verdict = Verdict::Inconclusive;
    std::optional<Eigen::VectorXd> failing_witness;
    std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> collision;
    std::size_t wedge_count = 0;
    std::string method;
    std::string note;
    std::optional<std::vector<WedgeRankRecord>> evidence;  // flag-gated rank table
};

}  // namespace injectcheck
