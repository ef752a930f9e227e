#pragma once

#include <stdexcept>
#include <string>

namespace vfree {

// Domain error raised by every library operation whose precondition fails.
// The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an explicit resource cap (group order, closure size,
// enumeration size) would be exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace vfree
