#pragma once

#include <stdexcept>
#include <string>

namespace plbandit {

// Precondition violations on public operations.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Iterative solvers that fail to converge, loss of positive definiteness.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed dataset / manifest / config content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system failures. The message always carries the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace plbandit
