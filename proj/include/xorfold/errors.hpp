#ifndef XORFOLD_ERRORS_HPP
#define XORFOLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace xorfold {

/// An argument is outside the documented domain of an operation.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The object is not in a state that supports the call (e.g. no planted string).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The request would exceed a memory or size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical precondition failed at evaluation time (non-positive
/// denominator, log of a non-positive value, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A root finder or fit could not produce a result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xorfold

#endif  // XORFOLD_ERRORS_HPP
