#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace injectcheck {

// Index sets are kept sorted, 0-based internally; serialization is 1-based
// to match the row-numbering convention used everywhere in docs and output.
using IndexSet = std::vector<int>;

// Rejects non-finite entries and empty shapes.
void validate_matrix(const Eigen::MatrixXd& m, const char* what = "matrix");
void validate_vector(const Eigen::VectorXd& v, const char* what = "vector");

// CSV: one row per line, comma-separated decimal literals, no header.
Eigen::MatrixXd read_matrix_csv(std::istream& in);
Eigen::MatrixXd read_matrix_csv_file(const std::string& path);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix_csv_file(const std::string& path, const Eigen::MatrixXd& m);

// 17 significant digits; makes runs diffable.
std::string format_double(double v);

}  // namespace injectcheck
