#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace injectcheck {

// Counter-based generator: the k-th output is a pure function of
// (seed, stream, k), so any (seed, stream) pair replays the same sequence on
// every platform and streams can be handed to parallel workers bit-safely.
//
// Construction: both seed and stream are diffused through the SplitMix64
// finalizer, then output k is finalize(base + (k+1) * golden_gamma). See the
// repo README for the reproducibility contract.
class Prng {
public:
    explicit Prng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // Derive an independent stream sharing this generator's seed.
    Prng substream(std::uint64_t stream) const { return Prng(seed_, stream); }

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01();

    // Uniform on [lo, hi).
    double uniform(double lo, double hi);

    // Standard normal via the Marsaglia polar rejection transform.
    double normal();

    // Unit vector uniform on the sphere S^{n-1}.
    Eigen::VectorXd unit_sphere(int n);

    Eigen::VectorXd normal_vector(int n);

    // iid standard-normal entries, filled row-major.
    Eigen::MatrixXd gaussian_matrix(int rows, int cols);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// iid standard normal matrix, deterministic in (prng.seed, prng.stream).
Eigen::MatrixXd sample_gaussian_matrix(int rows, int cols, Prng& prng);

}  // namespace injectcheck
