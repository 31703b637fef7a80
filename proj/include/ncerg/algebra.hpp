#pragma once

// Finite-dimensional tracial von Neumann algebras.
//
// M = M_{n_1}(C) (+) ... (+) M_{n_K}(C) with trace tau(x) = sum_k w_k Tr(x_k).
// Elements are stored blockwise. The flattened "coordinate" representation
// concatenates the blocks, each in row-major order, so a linear map on M is a
// plain dim(M) x dim(M) complex matrix (see channel.hpp).

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "ncerg/core.hpp"

namespace ncerg {

struct Block {
  int dim = 1;
  double weight = 1.0;

  bool operator==(const Block&) const = default;
};

class TraceAlgebra {
 public:
  TraceAlgebra() = default;
  TraceAlgebra(std::vector<Block> blocks, bool normalized);

  /// M_n(C) with the normalized trace.
  static TraceAlgebra matrix(int n);
  /// l^inf on n points with uniform probability weights.
  static TraceAlgebra diagonal(int n);

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  int block_dim(std::size_t k) const { return blocks_[k].dim; }
  double weight(std::size_t k) const { return blocks_[k].weight; }
  bool normalized() const { return normalized_; }

  /// Complex dimension of the algebra, sum_k n_k^2.
  std::size_t dimension() const { return dimension_; }
  /// Coordinate offset of block k.
  std::size_t offset(std::size_t k) const { return offsets_[k]; }
  /// tau(1) = sum_k w_k n_k.
  double unit_trace() const;
  /// Trace weight attached to every coordinate.
  const RealVector& coordinate_weights() const { return coord_weights_; }

  bool operator==(const TraceAlgebra& other) const {
    return blocks_ == other.blocks_ && normalized_ == other.normalized_;
  }

 private:
  std::vector<Block> blocks_;
  bool normalized_ = false;
  std::size_t dimension_ = 0;
  std::vector<std::size_t> offsets_;
  RealVector coord_weights_;
};

/// Blocks (n_k m_l, w_k v_l) ordered k-major. The tensor product of two
/// normalized algebras is normalized.
TraceAlgebra tensor(const TraceAlgebra& a, const TraceAlgebra& b);

class AlgElement {
 public:
  AlgElement() = default;
  explicit AlgElement(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {}

  static AlgElement zero(const TraceAlgebra& alg);
  static AlgElement identity(const TraceAlgebra& alg);
  /// Element with diagonal entries `diag` laid out block after block.
  static AlgElement diagonal(const TraceAlgebra& alg, const std::vector<cplx>& diag);

  std::size_t block_count() const { return blocks_.size(); }
  const Matrix& block(std::size_t k) const { return blocks_[k]; }
  Matrix& block(std::size_t k) { return blocks_[k]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  bool matches(const TraceAlgebra& alg) const;
  AlgElement adjoint() const;

  AlgElement& operator+=(const AlgElement& other);
  AlgElement& operator-=(const AlgElement& other);
  AlgElement& operator*=(cplx c);

  friend AlgElement operator+(AlgElement a, const AlgElement& b) { return a += b; }
  friend AlgElement operator-(AlgElement a, const AlgElement& b) { return a -= b; }
  friend AlgElement operator*(AlgElement a, cplx c) { return a *= c; }
  friend AlgElement operator*(cplx c, AlgElement a) { return a *= c; }
  friend AlgElement operator*(double c, AlgElement a) { return a *= cplx(c, 0.0); }
  /// Blockwise algebra product.
  friend AlgElement operator*(const AlgElement& a, const AlgElement& b);

 private:
  std::vector<Matrix> blocks_;
};

/// Kronecker product a (x) b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Throws StructuralError unless x has the block shapes of alg.
void require_shape(const TraceAlgebra& alg, const AlgElement& x);

Vector to_coordinates(const TraceAlgebra& alg, const AlgElement& x);
AlgElement from_coordinates(const TraceAlgebra& alg, const Vector& v);

cplx trace(const TraceAlgebra& alg, const AlgElement& x);
/// <x, y> = tau(y^* x).
cplx inner(const TraceAlgebra& alg, const AlgElement& x, const AlgElement& y);

/// Largest entrywise modulus over all blocks.
double max_abs(const AlgElement& x);

bool is_self_adjoint(const AlgElement& x, double tol = tol::kSpectrum);
/// Smallest eigenvalue of a self-adjoint element.
double min_eigenvalue(const AlgElement& x);
/// Self-adjoint with spectrum >= -tol.
bool is_positive(const AlgElement& x, double tol = tol::kSpectrum);
double operator_norm(const AlgElement& x);

struct SpectralPair {
  double eigenvalue;
  AlgElement projection;
};

/// Eigenvalues ascending, clusters closer than kEigenMerge merged.
std::vector<SpectralPair> spectral_decomposition(const TraceAlgebra& alg, const AlgElement& x);

/// f(x) for self-adjoint x, blockwise through the eigendecomposition.
AlgElement functional_calculus(const TraceAlgebra& alg, const AlgElement& x,
                               const std::function<double(double)>& f);

/// |x| = (x^* x)^{1/2}.
AlgElement absolute_value(const TraceAlgebra& alg, const AlgElement& x);

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = true;
  bool hi_closed = true;

  static Interval closed(double a, double b) { return {a, b, true, true}; }
  static Interval open(double a, double b) { return {a, b, false, false}; }
  /// (a, b]
  static Interval left_open(double a, double b) { return {a, b, false, true}; }
  /// [a, b)
  static Interval right_open(double a, double b) { return {a, b, true, false}; }

  bool contains(double v) const;
};

/// chi_I(x): sum of eigenprojections with eigenvalue in I.
AlgElement spectral_projection(const TraceAlgebra& alg, const AlgElement& x, const Interval& interval);

/// Weighted Schatten norm tau(|x|^p)^{1/p}; p = infinity gives the operator norm.
double lp_norm(const TraceAlgebra& alg, const AlgElement& x, double p);

struct HalfProjection {
  AlgElement projection;    // e = chi_[1/2,1](b)
  double defect = 0.0;      // tau(1 - e)
  double bound = 0.0;       // 2 tau(1 - b)
  AlgElement right_inverse; // b^- with e = b b^-, ||b^-|| <= 2
};

/// Spectral projection of 0 <= b <= 1 on [1/2, 1] with its trace defect and
/// the bounded right inverse of b on the range of e.
HalfProjection half_projection(const TraceAlgebra& alg, const AlgElement& b);

}  // namespace ncerg
