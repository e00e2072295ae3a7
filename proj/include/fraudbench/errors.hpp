#pragma once

#include <stdexcept>
#include <string>

namespace fraudbench {

// Caller broke a precondition (bad shape, bad argument, bad config).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed (non-convergence, singular matrix).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The operation is not available for this model kind.
class CapabilityError : public ContractError {
 public:
  using ContractError::ContractError;
};

// File-level problems while reading or writing data.
class DataError : public ContractError {
 public:
  enum class Kind {
    missing_file,
    missing_header,
    duplicate_header,
    missing_label_column,
    ragged_row,
    non_numeric,
    bad_label,
    io
  };

  DataError(Kind kind, const std::string& what) : ContractError(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace fraudbench
