#pragma once

#include <stdexcept>
#include <string>

namespace skl {

// Error taxonomy. The CLI maps these onto exit codes:
// argument/parse/validation -> 2, numerical -> 3, degenerate instance -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArgumentError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct DegenerateInstanceError : Error {
  using Error::Error;
};

}  // namespace skl
