#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vinecg {

/// Numeric data on the original scale.  Column-major so that per-variable
/// access is a contiguous span.
struct DataMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> values;       // values[j*n + i] = row i, column j
    std::vector<std::string> names;   // optional header names, size d when present

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[j * n + i]; }
    double& at(std::size_t i, std::size_t j) { return values[j * n + i]; }
    [[nodiscard]] std::span<const double> col(std::size_t j) const {
        return {values.data() + j * n, n};
    }
};

/// Rank-transformed observations, every entry strictly inside (0,1).
struct PseudoObsMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> values;  // column-major

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[j * n + i]; }
    double& at(std::size_t i, std::size_t j) { return values[j * n + i]; }
    [[nodiscard]] std::span<const double> col(std::size_t j) const {
        return {values.data() + j * n, n};
    }
};

/// Column-wise rank transform: entry (i,j) becomes rank / (n+1), with ties
/// resolved by average rank.  Throws DataError on non-finite input, naming
/// the row and column.
PseudoObsMatrix to_pseudo_obs(const DataMatrix& data);

/// Tie-corrected Kendall's tau-b in O(n log n) (merge-sort inversion
/// counting).  Throws NumericError when either vector is constant.
double kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace vinecg
