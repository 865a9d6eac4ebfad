#include "injectcheck/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "injectcheck/errors.hpp"

namespace injectcheck {

void validate_matrix(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() < 1 || m.cols() < 1)
        throw DimensionError(std::string(what) + ": needs at least one row and one column");
    if (!m.allFinite())
        throw DimensionError(std::string(what) + ": non-finite entry");
}

void validate_vector(const Eigen::VectorXd& v, const char* what) {
    if (!v.allFinite())
        throw DimensionError(std::string(what) + ": non-finite entry");
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Trim trailing CR from CRLF files.
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        std::size_t col_no = 1;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            std::string tok = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            try {
                std::size_t used = 0;
                double v = std::stod(tok, &used);
                while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
                if (used != tok.size()) throw std::invalid_argument("trailing junk");
                if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
                row.push_back(v);
            } catch (const std::exception&) {
                throw ParseError("bad CSV numeric literal '" + tok + "'", line_no, col_no);
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
            ++col_no;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("inconsistent column count", line_no, 1);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("empty matrix", line_no, 1);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

Eigen::MatrixXd read_matrix_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open '" + path + "'", 0, 0);
    return read_matrix_csv(f);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_matrix_csv_file(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot open '" + path + "' for writing", 0, 0);
    write_matrix_csv(f, m);
}

}  // namespace injectcheck
