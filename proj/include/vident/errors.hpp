#pragma once

#include <stdexcept>
#include <string>

namespace vident {

// Malformed input data or file contents. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Violated internal invariant. The CLI maps this to exit code 3.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace vident
