#include "ncerg/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ncerg {

TraceAlgebra::TraceAlgebra(std::vector<Block> blocks, bool normalized)
    : blocks_(std::move(blocks)), normalized_(normalized) {
  if (blocks_.empty()) throw StructuralError("trace algebra needs at least one block");
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    if (b.dim < 1) {
      std::ostringstream os;
      os << "block " << k << " has dimension " << b.dim << " < 1";
      throw DomainError(os.str());
    }
    if (!(b.weight > 0.0) || !std::isfinite(b.weight)) {
      std::ostringstream os;
      os << "block " << k << " has non-positive weight " << b.weight;
      throw DomainError(os.str());
    }
  }
  if (normalized_ && std::abs(unit_trace() - 1.0) > tol::kNormalized) {
    std::ostringstream os;
    os << "normalized algebra requires tau(1) = 1, got " << unit_trace();
    throw DomainError(os.str());
  }
  offsets_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    offsets_.push_back(dimension_);
    dimension_ += static_cast<std::size_t>(b.dim) * static_cast<std::size_t>(b.dim);
  }
  coord_weights_.resize(static_cast<Eigen::Index>(dimension_));
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto n2 = static_cast<Eigen::Index>(blocks_[k].dim * blocks_[k].dim);
    coord_weights_.segment(static_cast<Eigen::Index>(offsets_[k]), n2).setConstant(blocks_[k].weight);
  }
}

TraceAlgebra TraceAlgebra::matrix(int n) {
  if (n < 1) throw DomainError("matrix algebra needs n >= 1");
  return TraceAlgebra({{n, 1.0 / n}}, true);
}

TraceAlgebra TraceAlgebra::diagonal(int n) {
  if (n < 1) throw DomainError("diagonal algebra needs n >= 1");
  return TraceAlgebra(std::vector<Block>(static_cast<std::size_t>(n), Block{1, 1.0 / n}), true);
}

double TraceAlgebra::unit_trace() const {
  double s = 0.0;
  for (const auto& b : blocks_) s += b.weight * b.dim;
  return s;
}

TraceAlgebra tensor(const TraceAlgebra& a, const TraceAlgebra& b) {
  std::vector<Block> blocks;
  blocks.reserve(a.block_count() * b.block_count());
  for (const auto& x : a.blocks())
    for (const auto& y : b.blocks()) blocks.push_back({x.dim * y.dim, x.weight * y.weight});
  return TraceAlgebra(std::move(blocks), a.normalized() && b.normalized());
}

// ---------------------------------------------------------------------------

AlgElement AlgElement::zero(const TraceAlgebra& alg) {
  std::vector<Matrix> blocks;
  blocks.reserve(alg.block_count());
  for (const auto& b : alg.blocks()) blocks.push_back(Matrix::Zero(b.dim, b.dim));
  return AlgElement(std::move(blocks));
}

AlgElement AlgElement::identity(const TraceAlgebra& alg) {
  std::vector<Matrix> blocks;
  blocks.reserve(alg.block_count());
  for (const auto& b : alg.blocks()) blocks.push_back(Matrix::Identity(b.dim, b.dim));
  return AlgElement(std::move(blocks));
}

AlgElement AlgElement::diagonal(const TraceAlgebra& alg, const std::vector<cplx>& diag) {
  auto x = zero(alg);
  std::size_t total = 0;
  for (const auto& b : alg.blocks()) total += static_cast<std::size_t>(b.dim);
  if (diag.size() != total) throw StructuralError("diagonal length does not match the algebra");
  std::size_t pos = 0;
  for (std::size_t k = 0; k < alg.block_count(); ++k)
    for (int i = 0; i < alg.block_dim(k); ++i) x.block(k)(i, i) = diag[pos++];
  return x;
}

bool AlgElement::matches(const TraceAlgebra& alg) const {
  if (blocks_.size() != alg.block_count()) return false;
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    if (blocks_[k].rows() != alg.block_dim(k) || blocks_[k].cols() != alg.block_dim(k)) return false;
  return true;
}

AlgElement AlgElement::adjoint() const {
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.adjoint());
  return AlgElement(std::move(out));
}

namespace {
void require_same_shape(const AlgElement& a, const AlgElement& b) {
  bool ok = a.block_count() == b.block_count();
  for (std::size_t k = 0; ok && k < a.block_count(); ++k)
    ok = a.block(k).rows() == b.block(k).rows() && a.block(k).cols() == b.block(k).cols();
  if (!ok) throw StructuralError("element block shapes differ");
}
}  // namespace

AlgElement& AlgElement::operator+=(const AlgElement& other) {
  require_same_shape(*this, other);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += other.blocks_[k];
  return *this;
}

AlgElement& AlgElement::operator-=(const AlgElement& other) {
  require_same_shape(*this, other);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= other.blocks_[k];
  return *this;
}

AlgElement& AlgElement::operator*=(cplx c) {
  for (auto& b : blocks_) b *= c;
  return *this;
}

AlgElement operator*(const AlgElement& a, const AlgElement& b) {
  require_same_shape(a, b);
  std::vector<Matrix> out;
  out.reserve(a.block_count());
  for (std::size_t k = 0; k < a.block_count(); ++k) out.push_back(a.block(k) * b.block(k));
  return AlgElement(std::move(out));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void require_shape(const TraceAlgebra& alg, const AlgElement& x) {
  if (!x.matches(alg)) throw StructuralError("element does not belong to the algebra");
}

Vector to_coordinates(const TraceAlgebra& alg, const AlgElement& x) {
  require_shape(alg, x);
  Vector v(static_cast<Eigen::Index>(alg.dimension()));
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    const int n = alg.block_dim(k);
    auto off = static_cast<Eigen::Index>(alg.offset(k));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v(off + i * n + j) = x.block(k)(i, j);
  }
  return v;
}

AlgElement from_coordinates(const TraceAlgebra& alg, const Vector& v) {
  if (v.size() != static_cast<Eigen::Index>(alg.dimension()))
    throw StructuralError("coordinate vector length does not match the algebra");
  auto x = AlgElement::zero(alg);
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    const int n = alg.block_dim(k);
    auto off = static_cast<Eigen::Index>(alg.offset(k));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x.block(k)(i, j) = v(off + i * n + j);
  }
  return x;
}

cplx trace(const TraceAlgebra& alg, const AlgElement& x) {
  require_shape(alg, x);
  cplx s = 0.0;
  for (std::size_t k = 0; k < alg.block_count(); ++k) s += alg.weight(k) * x.block(k).trace();
  return s;
}

cplx inner(const TraceAlgebra& alg, const AlgElement& x, const AlgElement& y) {
  require_shape(alg, x);
  require_shape(alg, y);
  cplx s = 0.0;
  for (std::size_t k = 0; k < alg.block_count(); ++k)
    s += alg.weight(k) * (y.block(k).conjugate().cwiseProduct(x.block(k))).sum();
  return s;
}

double max_abs(const AlgElement& x) {
  double m = 0.0;
  for (const auto& b : x.blocks())
    if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

bool is_self_adjoint(const AlgElement& x, double tol) {
  const double scale = std::max(1.0, max_abs(x));
  for (const auto& b : x.blocks())
    if (b.size() > 0 && (b - b.adjoint()).cwiseAbs().maxCoeff() > tol * scale) return false;
  return true;
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> hermitian_eig(const Matrix& b) {
  const Matrix h = 0.5 * (b + b.adjoint());
  return Eigen::SelfAdjointEigenSolver<Matrix>(h);
}

void require_self_adjoint(const AlgElement& x) {
  if (!is_self_adjoint(x)) throw DomainError("element is not self-adjoint");
}

}  // namespace

double min_eigenvalue(const AlgElement& x) {
  require_self_adjoint(x);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : x.blocks()) m = std::min(m, hermitian_eig(b).eigenvalues().minCoeff());
  return m;
}

bool is_positive(const AlgElement& x, double tol) {
  if (!is_self_adjoint(x, tol)) return false;
  for (const auto& b : x.blocks())
    if (hermitian_eig(b).eigenvalues().minCoeff() < -tol) return false;
  return true;
}

double operator_norm(const AlgElement& x) {
  double m = 0.0;
  for (const auto& b : x.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(b);
    m = std::max(m, svd.singularValues()(0));
  }
  return m;
}

std::vector<SpectralPair> spectral_decomposition(const TraceAlgebra& alg, const AlgElement& x) {
  require_shape(alg, x);
  require_self_adjoint(x);

  struct Eigenpair {
    double value;
    std::size_t block;
    Vector vec;
  };
  std::vector<Eigenpair> all;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    auto es = hermitian_eig(x.block(k));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      all.push_back({es.eigenvalues()(i), k, es.eigenvectors().col(i)});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Eigenpair& a, const Eigenpair& b) { return a.value < b.value; });

  std::vector<SpectralPair> out;
  std::size_t start = 0;
  while (start < all.size()) {
    std::size_t end = start + 1;
    while (end < all.size() && all[end].value - all[end - 1].value <= tol::kEigenMerge) ++end;
    auto proj = AlgElement::zero(alg);
    double sum = 0.0;
    for (std::size_t i = start; i < end; ++i) {
      proj.block(all[i].block) += all[i].vec * all[i].vec.adjoint();
      sum += all[i].value;
    }
    out.push_back({sum / static_cast<double>(end - start), std::move(proj)});
    start = end;
  }
  return out;
}

AlgElement functional_calculus(const TraceAlgebra& alg, const AlgElement& x,
                               const std::function<double(double)>& f) {
  require_shape(alg, x);
  require_self_adjoint(x);
  std::vector<Matrix> out;
  out.reserve(x.block_count());
  for (const auto& b : x.blocks()) {
    auto es = hermitian_eig(b);
    RealVector fv = es.eigenvalues().unaryExpr(f);
    out.push_back(es.eigenvectors() * fv.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
  }
  return AlgElement(std::move(out));
}

AlgElement absolute_value(const TraceAlgebra& alg, const AlgElement& x) {
  require_shape(alg, x);
  std::vector<Matrix> out;
  out.reserve(x.block_count());
  for (const auto& b : x.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix& v = svd.matrixV();
    out.push_back(v * svd.singularValues().cast<cplx>().asDiagonal() * v.adjoint());
  }
  return AlgElement(std::move(out));
}

bool Interval::contains(double v) const {
  const bool above = lo_closed ? v >= lo : v > lo;
  const bool below = hi_closed ? v <= hi : v < hi;
  return above && below;
}

AlgElement spectral_projection(const TraceAlgebra& alg, const AlgElement& x, const Interval& interval) {
  return functional_calculus(alg, x, [&](double v) { return interval.contains(v) ? 1.0 : 0.0; });
}

double lp_norm(const TraceAlgebra& alg, const AlgElement& x, double p) {
  require_shape(alg, x);
  if (!(p >= 1.0)) throw DomainError("lp_norm requires p >= 1");
  if (std::isinf(p)) return operator_norm(x);
  double s = 0.0;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    Eigen::JacobiSVD<Matrix> svd(x.block(k));
    s += alg.weight(k) * svd.singularValues().array().pow(p).sum();
  }
  return std::pow(s, 1.0 / p);
}

HalfProjection half_projection(const TraceAlgebra& alg, const AlgElement& b) {
  require_shape(alg, b);
  if (!is_self_adjoint(b)) throw DomainError("half_projection requires self-adjoint b");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& blk : b.blocks()) {
    const auto ev = hermitian_eig(blk).eigenvalues();
    lo = std::min(lo, ev.minCoeff());
    hi = std::max(hi, ev.maxCoeff());
  }
  if (lo < -tol::kSpectrum || hi > 1.0 + tol::kSpectrum)
    throw DomainError("half_projection requires 0 <= b <= 1");

  HalfProjection out;
  out.projection = functional_calculus(alg, b, [](double v) { return v >= 0.5 ? 1.0 : 0.0; });
  out.right_inverse = functional_calculus(alg, b, [](double v) { return v >= 0.5 ? 1.0 / v : 0.0; });
  const auto one = AlgElement::identity(alg);
  out.defect = trace(alg, one - out.projection).real();
  out.bound = 2.0 * trace(alg, one - b).real();
  if (out.defect > out.bound + 1e-10)
    throw NumericError("half_projection: tau(1-e) <= 2 tau(1-b) violated");
  return out;
}

}  // namespace ncerg
