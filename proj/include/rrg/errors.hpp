#pragma once

#include <stdexcept>
#include <string>

namespace rrg {

// Raised when a requested computation exceeds a configured work budget
// (enumeration size, cycle-search work, eigen cap, oracle enumeration).
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the dense symmetric eigensolver does not converge.
class EigenSolverError : public std::runtime_error {
public:
    explicit EigenSolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rrg
