#pragma once

#include <stdexcept>
#include <string>

namespace ssmix {

// Numerical failure carrying enough context to locate the offending
// component or data row (index is -1 when not applicable).
class NumericError : public std::runtime_error {
 public:
  NumericError(std::string message, long index = -1)
      : std::runtime_error(index >= 0 ? message + " (index " + std::to_string(index) + ")"
                                      : message),
        index_(index) {}

  long index() const noexcept { return index_; }

 private:
  long index_;
};

// Malformed or inconsistent input data (files, labels, dimensions).
class DataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ssmix
