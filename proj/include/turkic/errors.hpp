#pragma once

#include <stdexcept>
#include <string>

namespace turkic {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input text is not in the documented format.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Value out of its documented domain (range, uniqueness, dimensions, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure produced a non-finite value or failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace detail
}  // namespace turkic
