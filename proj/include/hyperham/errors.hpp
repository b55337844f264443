#pragma once

#include <stdexcept>
#include <string>

namespace hyperham {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or type mismatch: wrong dimension, wrong degree, unsupported kind.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value showed up where a finite one was required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not available for this input kind.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Adaptive integration could not make progress.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_good_time)
      : Error(what), last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

 private:
  double last_good_time_;
};

}  // namespace hyperham
