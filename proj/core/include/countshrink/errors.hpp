#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace countshrink {

// Series or iterative evaluation ran out of budget before meeting its tolerance.
class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inadmissible input data (CSV rows, count vectors).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two-means clustering on weights that are all equal.
class DegenerateClusteringError : public std::runtime_error {
public:
    DegenerateClusteringError() : std::runtime_error("degenerate clustering") {}
};

}  // namespace countshrink
