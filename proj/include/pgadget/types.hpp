#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace pgadget {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CSparse = Eigen::SparseMatrix<Complex>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or indices that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An input value outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed (singular block, missing gap, bad residual).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A geometric series whose ratio is not below one.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, double ratio)
      : NumericalError(what), ratio_(ratio) {}
  double ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};

/// A dimension or policy cap would be exceeded.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, double estimate)
      : Error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

}  // namespace pgadget
