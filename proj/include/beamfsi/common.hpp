/// @file common.hpp
/// Shared aliases, error types and periodic index helpers.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace beamfsi {

using Vec = std::vector<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or invalid operation input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Solver or construction failure (non-convergence, infeasible parameters).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class HashMismatchError : public Error {
 public:
  using Error::Error;
};

inline int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

void require(bool cond, const std::string& what);

}  // namespace beamfsi
