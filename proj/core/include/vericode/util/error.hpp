#pragma once

#include <stdexcept>
#include <string>

namespace vericode {

/// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document or file (schema, checksum, truncation).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent configuration (credentials, flags, versions).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Transport failures talking to an external completion service.
class InfraError : public Error {
 public:
  explicit InfraError(const std::string& what, int attempts = 1) : Error(what), attempts_(attempts) {}
  /// Transport attempts made before giving up.
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

}  // namespace vericode
