#pragma once

#include <stdexcept>
#include <string>

namespace kcore {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Iterative solver hit its iteration cap or lost its bracket.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A sampling request that has no valid outcome (or no cheap one).
class InfeasibleError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Search or rejection loop ran past its configured cap.
class BudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Floating point result not representable (e.g. division by an underflowed power).
class OverflowError : public std::overflow_error {
public:
  using std::overflow_error::overflow_error;
};

}  // namespace kcore
