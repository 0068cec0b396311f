#pragma once

#include <stdexcept>
#include <string>

namespace qest {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong shape, non-Hermitian, not a state, not trace preserving.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A parameter lies outside the interval on which a family is defined.
class RangeError : public Error {
public:
  using Error::Error;
};

/// The requested quantity is undefined for this input (zero Fisher
/// information, all noise operators zero, ...).
class DegenerateError : public Error {
public:
  using Error::Error;
};

/// The closed-form enhancement factor needs an invertible real metric.
class SingularGeometryError : public Error {
public:
  using Error::Error;
};

} // namespace qest
