#pragma once

#include <stdexcept>
#include <string>

namespace tpjoin {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (relation files, lineage, theta).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that breaks a data-model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An operation was called with input that violates its precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Exact evaluation refused because a size cap was exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace tpjoin
