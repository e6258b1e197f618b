#pragma once

#include <stdexcept>
#include <string>

namespace paracurves {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two algebra elements (or an element and a subspace) belong to different algebras.
class SpecMismatchError : public Error {
public:
  using Error::Error;
};

/// The generator of a model curve lies in the parabolic subalgebra.
class DegenerateDirectionError : public Error {
public:
  using Error::Error;
};

/// Sampled linear systems whose rank has not plateaued.
class DegenerateSamplingError : public Error {
public:
  using Error::Error;
};

/// Metric is singular or not positive definite at an evaluation point.
class SingularMetricError : public Error {
public:
  using Error::Error;
};

/// Evaluation point outside the chart's domain.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Caller violated a documented precondition (dimension, normalisation, ...).
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// A contact direction is not normalised (U^αV_α ≠ 1).
class NormalizationError : public PreconditionError {
public:
  using PreconditionError::PreconditionError;
};

/// Malformed configuration or fixture. Carries a 1-based line number when known.
class SchemaError : public Error {
public:
  SchemaError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

/// A numerical routine produced non-finite values or failed to converge.
class NumericalBreakdown : public Error {
public:
  using Error::Error;
};

}  // namespace paracurves
