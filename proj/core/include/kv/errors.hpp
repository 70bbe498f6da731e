#pragma once

#include <stdexcept>
#include <string>

namespace kv {

// Base class for all library failures.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user input or violated precondition (bad mesh size, empty system,
// inadmissible parameter range).
struct ConfigError : Error {
  using Error::Error;
};

// Numerical failure: singular factorization, iteration that did not converge.
struct SolverError : Error {
  using Error::Error;
};

}  // namespace kv
