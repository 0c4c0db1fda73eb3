#ifndef ASCTK_ERRORS_HPP
#define ASCTK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace asctk {

/// Rejected input: bad shapes, invalid parameters, malformed files.
/// Maps to CLI exit code 2.
class InvalidInputError : public std::invalid_argument {
public:
  explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: infeasible constraints, divergent solves.
/// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace asctk

#endif
