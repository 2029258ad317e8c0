#pragma once

#include <stdexcept>
#include <string>

namespace pvgp {

/// Base of every error raised by the library. The CLI maps subclasses of
/// DataError to exit code 2 and NumericalError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad files, invalid specs, misaligned
/// timestamps, insufficient coverage.
class DataError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

class CoverageError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyDatasetError : public DataError {
 public:
  using DataError::DataError;
};

class ProjectionDomainError : public DataError {
 public:
  using DataError::DataError;
};

class ConfigError : public DataError {
 public:
  using DataError::DataError;
};

/// Numerical failures inside inference or fitting.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed even at the largest jitter level.
class ConditioningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Every restart of the hyperparameter search ended with a non-finite
/// objective.
class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pvgp
