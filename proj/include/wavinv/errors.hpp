#pragma once

#include <stdexcept>
#include <string>

namespace wavinv {

/// Input or configuration violates a documented invariant (CLI exit code 2).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical stage failed: root bracketing, ill-conditioned solve, poor fit (CLI exit code 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wavinv
