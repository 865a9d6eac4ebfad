#include "injectcheck/linalg.hpp"

#include "injectcheck/errors.hpp"
#include "injectcheck/matrix_io.hpp"

namespace injectcheck {

double smallest_singular_value(const Eigen::MatrixXd& m) {
    validate_matrix(m, "smallest_singular_value");
    if (m.rows() < m.cols())
        throw DimensionError("smallest_singular_value: rows < cols");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues().minCoeff();
}

int rank(const Eigen::MatrixXd& m, double tol) {
    validate_matrix(m, "rank");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    if (smax <= 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * smax) ++r;
    return r;
}

std::optional<Eigen::VectorXd> nullspace_vector(const Eigen::MatrixXd& m, double tol) {
    validate_matrix(m, "nullspace_vector");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const Eigen::Index n = m.cols();
    int r = 0;
    if (smax > 0.0)
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > tol * smax) ++r;
    if (r >= n) return std::nullopt;
    Eigen::VectorXd v = svd.matrixV().col(n - 1);
    v.normalize();
    return v;
}

}  // namespace injectcheck
