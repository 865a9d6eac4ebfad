#include "injectcheck/prng.hpp"

#include <cmath>

#include "injectcheck/errors.hpp"

namespace injectcheck {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix_finalize(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

}  // namespace

Prng::Prng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
    base_ = splitmix_finalize(splitmix_finalize(seed + kGamma) + stream * 0xD1342543DE82EF95ull);
}

std::uint64_t Prng::next_u64() {
    ++counter_;
    return splitmix_finalize(base_ + counter_ * kGamma);
}

double Prng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Prng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Prng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    for (;;) {
        const double u = 2.0 * uniform01() - 1.0;
        const double v = 2.0 * uniform01() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            spare_ = v * f;
            has_spare_ = true;
            return u * f;
        }
    }
}

Eigen::VectorXd Prng::normal_vector(int n) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = normal();
    return x;
}

Eigen::VectorXd Prng::unit_sphere(int n) {
    for (;;) {
        Eigen::VectorXd x = normal_vector(n);
        const double nrm = x.norm();
        if (nrm > 1e-12) return x / nrm;
    }
}

Eigen::MatrixXd Prng::gaussian_matrix(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
}

Eigen::MatrixXd sample_gaussian_matrix(int rows, int cols, Prng& prng) {
    if (rows < 1 || cols < 1) throw DimensionError("sample_gaussian_matrix: rows, cols must be >= 1");
    return prng.gaussian_matrix(rows, cols);
}

}  // namespace injectcheck
