#pragma once

#include <stdexcept>
#include <string>

namespace minklab {

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, non-contractive ratios, invalid data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A configured point, sample or cell cap was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A region has (numerically) zero measure where positive measure is needed.
class DegenerateRegionError : public Error {
 public:
  using Error::Error;
};

/// Two computations that must agree did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A geometric hypothesis (open set condition etc.) failed on the input.
class ConditionFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace minklab
