#pragma once

#include <stdexcept>
#include <string>

namespace igb {

enum class ErrorKind {
  Input,          // malformed data or out-of-domain arguments
  Config,         // invalid experiment configuration
  Convergence,    // an iterative solver failed to converge
  NumericalBlowup,
  Unsupported,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what)
      : Error(ErrorKind::Convergence, what) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what)
      : Error(ErrorKind::Unsupported, what) {}
};

/// Raised when a leaf value or prediction becomes non-finite during a flow.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(double time, const std::string& what)
      : Error(ErrorKind::NumericalBlowup, what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace igb
