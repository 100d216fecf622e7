#pragma once

#include <stdexcept>
#include <string>

namespace cmqe {

// Malformed, inconsistent or unjoinable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training or evaluation produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmqe
