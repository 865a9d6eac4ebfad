#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace injectcheck {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularBasisError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonPositiveScaleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateRatioError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroRowError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedStrideError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotInjectiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a combinatorial enumeration exceeds its configured cell cap.
// Callers that certify turn this into an Inconclusive verdict.
struct BudgetExceededError : std::runtime_error {
    explicit BudgetExceededError(std::string what, std::size_t partial = 0)
        : std::runtime_error(std::move(what)), partial_count(partial) {}
    std::size_t partial_count;
};

struct ParseError : std::runtime_error {
    ParseError(std::string what, std::size_t line_no, std::size_t col_no)
        : std::runtime_error(std::move(what)), line(line_no), col(col_no) {}
    std::size_t line;
    std::size_t col;
};

}  // namespace injectcheck
