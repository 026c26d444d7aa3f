#pragma once

#include <stdexcept>
#include <string>

namespace sparselab {

// Exponents or other numeric parameters outside their admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An instance on which a quantity is undefined (zero mass where an average
// is taken, empty family, ...).
class DegenerateInstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-side contract violation, e.g. a step function whose partition does
// not resolve the family.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sparselab
