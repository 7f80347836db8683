#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace alglift {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violated a stated precondition (shape, range, support).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The polynomial relation p(T) = 0 does not hold within tolerance.
class RelationViolated : public Error {
 public:
  using Error::Error;
};

/// A numerical rank or norm comparison fell inside an ambiguity band.
class ToleranceAmbiguity : public Error {
 public:
  using Error::Error;
};

/// Solver failure or a transformation too ill-conditioned to trust.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace alglift
