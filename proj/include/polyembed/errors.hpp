#pragma once

#include <stdexcept>
#include <string>

namespace polyembed {

// Every error thrown by the library derives from Error; the CLI maps
// each subclass to its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class GuardExceeded : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NotADistribution : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnknownReport : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidSetFunction : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnsupportedDimension : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotRepresentative : public Error {
 public:
  using Error::Error;
};

class LinkError : public Error {
 public:
  using Error::Error;
};

class EmptyReportSet : public LinkError {
 public:
  using LinkError::LinkError;
};

class IndirectElicitationFails : public LinkError {
 public:
  using LinkError::LinkError;
};

class EmptyEnvelope : public LinkError {
 public:
  using LinkError::LinkError;
};

// Thrown when an exact bound is contradicted by an exact counterexample.
class ViolationWithProof : public Error {
 public:
  using Error::Error;
};

}  // namespace polyembed
