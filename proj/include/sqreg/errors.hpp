#pragma once

#include <stdexcept>
#include <string>

namespace sqreg {

// Unreadable/unwritable files and other OS-level failures. CLI exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file content (CSV cells, config syntax); message carries the
// source location. CLI exit code 2.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally valid input that asks for something invalid. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sqreg
