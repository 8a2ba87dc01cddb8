#pragma once

#include <stdexcept>
#include <string_view>

namespace growthnet {

inline constexpr std::string_view kLibraryName = "growthnet";
inline constexpr std::string_view kLibraryVersion = "0.1.0";

// Bad user input: nonpositive rates, malformed configuration, arguments
// outside a function's domain.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested computation would exceed a configured resource cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An asymptotic routine was invoked outside the regime it models.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace growthnet
