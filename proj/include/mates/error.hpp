#pragma once

#include <stdexcept>
#include <string>

namespace mates {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied setting is out of range (k too large, unknown scheme, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input values violate a data invariant (non-finite, negative, overflow, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// The data admit no well-defined statistic (zero bandwidth, singular covariance).
class Degenerate : public Error {
 public:
  using Error::Error;
};

}  // namespace mates
