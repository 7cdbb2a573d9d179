#pragma once

#include <stdexcept>
#include <string>

namespace copeq {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested object too large to materialize.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Inconsistent or unresolvable test/study configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed user-supplied data (CSV files and the like).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace copeq
