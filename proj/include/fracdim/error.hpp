#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace fracdim {

/// Shortest round-trip text for a double, used in messages.
inline std::string num_text(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates an operation precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The sample is too coarse for the requested scale. Carries the sampling
/// density that would have been needed.
class UnderResolution : public Error {
 public:
  UnderResolution(const std::string& what, double required_delta)
      : Error(what), required_delta_(required_delta) {}

  double required_delta() const noexcept { return required_delta_; }

 private:
  double required_delta_;
};

/// A request would exceed the configured memory or enumeration budget.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// Input file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracdim
