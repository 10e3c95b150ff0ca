#pragma once

#include <stdexcept>
#include <string>

namespace christo {

// Each error category maps to one CLI exit code (see tools/christo_main.cpp).

/// Bad invocation or malformed configuration.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input data: ragged CSV, label out of range, empty class, dimension mismatch.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A factorization or evaluation could not produce a meaningful result.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace christo
