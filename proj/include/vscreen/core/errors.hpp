#pragma once

#include <stdexcept>
#include <string>

namespace vscreen {

// Bad inputs: missing files, malformed rows, inconsistent manifests.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric breakdown during training or evaluation (NaN activations,
// zeroed-out top layer). Distinct from DataError so the CLI can map it to a
// dedicated exit code.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vscreen
