#pragma once

#include <stdexcept>
#include <string>

namespace right {

// Root of every error the library raises. The CLI maps the three direct
// subclasses onto its exit codes (1 usage, 2 data, 3 backend).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (corpus files, lexicons, snapshots).
class DataError : public Error {
 public:
  using Error::Error;
};

// A generation or embedding backend failed.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace right
