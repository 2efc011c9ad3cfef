#pragma once

#include <stdexcept>
#include <string>

namespace chs {

// Base class for every failure raised by the solver suite.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Matrix failed a structural requirement (not SPD, not symmetric, singular).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline void require_dim(bool ok, const std::string& what) {
  if (!ok) throw DimensionError("dimension mismatch: " + what);
}

}  // namespace chs
