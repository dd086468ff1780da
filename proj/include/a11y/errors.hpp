#pragma once

#include <stdexcept>
#include <string>

namespace a11y {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// App definition failed validation.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Operation is not valid in the current device or session state.
class StateError : public Error {
 public:
  using Error::Error;
};

/// An input action cannot be applied to its target.
class ActionError : public Error {
 public:
  using Error::Error;
};

/// LLM transport failure. `retryable` distinguishes transient failures.
class ClientError : public Error {
 public:
  ClientError(const std::string& what, bool retryable = false)
      : Error(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class PlanningError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class PatchError : public Error {
 public:
  using Error::Error;
};

class ExportError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace a11y
