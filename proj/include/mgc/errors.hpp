#pragma once

#include <stdexcept>
#include <string>

namespace mgc {

/// Process exit codes shared by every CLI subcommand.
enum class ExitCode : int {
  Ok = 0,
  Usage = 1,
  Validation = 2,
  CertificateUnsatisfied = 3,
  NumericFailure = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Malformed or unreadable configuration text.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::Validation, what) {}
};

/// Well-formed input that violates a model invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ExitCode::Validation, what) {}
};

/// Valid network outside the class the modal certificate supports
/// (repeated nonzero Laplacian eigenvalues).
class UnsupportedNetwork : public Error {
 public:
  explicit UnsupportedNetwork(const std::string& what) : Error(ExitCode::Validation, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ExitCode::NumericFailure, what) {}
};

class CertificateError : public Error {
 public:
  explicit CertificateError(const std::string& what)
      : Error(ExitCode::CertificateUnsatisfied, what) {}
};

}  // namespace mgc
