#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qstar {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Wavevector in R^d.
using KVec = Eigen::VectorXd;

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// path; `parallel` uses OpenMP and must produce bit-identical results.
enum class Exec { serial, parallel };

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct UnsupportedError : Error {
  using Error::Error;
};

/// Weight matrix V is not positive definite on the constraint subspace at k.
struct DegenerateWeightError : Error {
  DegenerateWeightError(const std::string& what, KVec at)
      : Error(what), k(std::move(at)) {}
  KVec k;
};

struct DegenerateConstraintError : Error {
  using Error::Error;
};

struct NotPsdError : Error {
  using Error::Error;
};

struct UnboundedSupremumError : Error {
  using Error::Error;
};

struct NotAttainedError : Error {
  using Error::Error;
};

struct NonPolynomialError : Error {
  using Error::Error;
};

struct NoCommonLatticeError : Error {
  using Error::Error;
};

struct SharpnessViolationError : Error {
  using Error::Error;
};

struct InconsistencyError : Error {
  using Error::Error;
};

struct AliasingError : Error {
  using Error::Error;
};

struct GuardBandError : Error {
  using Error::Error;
};

}  // namespace qstar
