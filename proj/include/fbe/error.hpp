#ifndef FBE_ERROR_HPP
#define FBE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fbe {

/// Rejected input: violated precondition or inconsistent parameters.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A solver failed to converge or a requested quantity is infeasible.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Enumeration or segment count exceeds a hard cap.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fbe

#endif  // FBE_ERROR_HPP
