#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ncerg {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy. Every failure the library reports derives from Error so
// callers can catch one type; the CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or block structures that do not fit together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite evaluations or failed numerical searches.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A theorem's hypothesis does not hold, so its conclusion is not checked.
/// Distinct from a violation of the conclusion.
class HypothesisNotMet : public Error {
 public:
  using Error::Error;
};

/// Work that would exceed a configured guard (e.g. sphere enumeration size).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace tol {
inline constexpr double kSpectrum = 1e-10;      // self-adjointness, positivity
inline constexpr double kEigenMerge = 1e-10;    // degenerate eigenvalue merge
inline constexpr double kKernel = 1e-9;         // kernel singular-value cutoff
inline constexpr double kReconstruct = 1e-9;    // spectral reconstruction
inline constexpr double kNormalized = 1e-12;    // sum of w_k n_k == 1
inline constexpr double kFlag = 1e-10;          // channel flag certification
inline constexpr double kMultiplicative = 1e-9; // automorphism sample check
inline constexpr double kClosure = 1e-9;        // subalgebra closure
inline constexpr double kOrthonormal = 1e-10;   // subalgebra basis
}  // namespace tol

}  // namespace ncerg
