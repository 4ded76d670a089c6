#pragma once

#include <stdexcept>
#include <string>

namespace vinecg {

/// Malformed or inconsistent input data (CSV cells, JSON documents,
/// out-of-range observations).
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure, e.g. a root finder that did not converge.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Violation of the vine graph contract: invalid structure, an infeasible
/// sampling order, or a level that cannot be completed.
class StructureError : public std::runtime_error {
  public:
    explicit StructureError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vinecg
