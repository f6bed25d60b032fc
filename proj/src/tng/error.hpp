#pragma once

#include <stdexcept>
#include <string>

namespace tng {

enum class ErrorCode {
  InvalidInput,
  Parse,
  Validation,
  Io,
  DimensionMismatch,
  NoPath,
  ExpertLost,
  Runtime,
};

// Base of every exception thrown by the core. The C API maps `code()` onto
// its status enum, so keep the two lists in sync.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& m) : Error(ErrorCode::InvalidInput, m) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& m) : Error(ErrorCode::Parse, m) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m) : Error(ErrorCode::Validation, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::Io, m) {}
};

class DimensionMismatchError : public Error {
 public:
  DimensionMismatchError(const std::string& what, long expected, long actual)
      : Error(ErrorCode::DimensionMismatch,
              what + ": expected dimension " + std::to_string(expected) + ", got " +
                  std::to_string(actual)) {}
};

class NoPathError : public Error {
 public:
  explicit NoPathError(const std::string& m) : Error(ErrorCode::NoPath, m) {}
};

class ExpertLostError : public Error {
 public:
  explicit ExpertLostError(const std::string& m) : Error(ErrorCode::ExpertLost, m) {}
};

}  // namespace tng
