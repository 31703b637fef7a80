#include "ncerg/expectation.hpp"

#include <cmath>
#include <sstream>

#include "ncerg/random.hpp"

namespace ncerg {

namespace {

RealVector sqrt_weights(const TraceAlgebra& alg) { return alg.coordinate_weights().cwiseSqrt(); }

double l2_norm(const TraceAlgebra& alg, const AlgElement& x) {
  return std::sqrt(std::max(0.0, inner(alg, x, x).real()));
}

// Orthonormal (in L2(tau)) basis for the span of the columns of `coords`,
// discarding directions with singular value below cutoff.
std::vector<AlgElement> orthonormal_columns(const TraceAlgebra& alg, const Matrix& coords, double cutoff) {
  const RealVector s = sqrt_weights(alg);
  const Matrix scaled = s.cast<cplx>().asDiagonal() * coords;
  Eigen::JacobiSVD<Matrix> svd(scaled, Eigen::ComputeThinU);
  std::vector<AlgElement> out;
  const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) <= cutoff * std::max(1.0, top)) break;
    const Vector v = svd.matrixU().col(i).cwiseQuotient(s.cast<cplx>());
    out.push_back(from_coordinates(alg, v));
  }
  return out;
}

}  // namespace

Subalgebra::Subalgebra(TraceAlgebra parent, std::vector<AlgElement> basis)
    : parent_(std::move(parent)), basis_(std::move(basis)) {
  if (basis_.empty()) throw DomainError("subalgebra basis is empty");
  for (const auto& b : basis_) require_shape(parent_, b);

  for (std::size_t i = 0; i < basis_.size(); ++i)
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      const cplx g = inner(parent_, basis_[j], basis_[i]);
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(g - expect) > tol::kOrthonormal) throw DomainError("subalgebra basis is not orthonormal");
    }

  const auto one = AlgElement::identity(parent_);
  if (distance(one) > tol::kClosure) throw DomainError("subalgebra does not contain the unit");
  for (const auto& b : basis_)
    if (distance(b.adjoint()) > tol::kClosure) throw DomainError("subalgebra is not closed under adjoint");
  for (const auto& a : basis_)
    for (const auto& b : basis_)
      if (distance(a * b) > tol::kClosure) throw DomainError("subalgebra is not closed under product");
}

Subalgebra Subalgebra::span(const TraceAlgebra& parent, const std::vector<AlgElement>& spanning) {
  if (spanning.empty()) throw DomainError("empty spanning set");
  Matrix coords(static_cast<Eigen::Index>(parent.dimension()), static_cast<Eigen::Index>(spanning.size()));
  for (std::size_t i = 0; i < spanning.size(); ++i)
    coords.col(static_cast<Eigen::Index>(i)) = to_coordinates(parent, spanning[i]);
  return Subalgebra(parent, orthonormal_columns(parent, coords, tol::kKernel));
}

Subalgebra Subalgebra::whole(const TraceAlgebra& parent) {
  std::vector<AlgElement> basis;
  for (std::size_t k = 0; k < parent.block_count(); ++k) {
    const int n = parent.block_dim(k);
    const double scale = 1.0 / std::sqrt(parent.weight(k));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto e = AlgElement::zero(parent);
        e.block(k)(i, j) = scale;
        basis.push_back(std::move(e));
      }
  }
  return Subalgebra(parent, std::move(basis));
}

Subalgebra Subalgebra::scalars(const TraceAlgebra& parent) {
  return Subalgebra(parent, {(1.0 / std::sqrt(parent.unit_trace())) * AlgElement::identity(parent)});
}

AlgElement Subalgebra::project(const AlgElement& x) const {
  auto out = AlgElement::zero(parent_);
  for (const auto& b : basis_) out += inner(parent_, x, b) * b;
  return out;
}

double Subalgebra::distance(const AlgElement& x) const { return l2_norm(parent_, x - project(x)); }

Subalgebra fixed_point_subalgebra(const std::vector<ChannelOperator>& maps, const TraceAlgebra& alg) {
  if (maps.empty()) return Subalgebra::whole(alg);
  const auto d = static_cast<Eigen::Index>(alg.dimension());
  const RealVector s = sqrt_weights(alg);
  Matrix stacked(d * static_cast<Eigen::Index>(maps.size()), d);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& m = maps[i];
    if (!(m.domain() == alg) || !m.is_endomorphism())
      throw StructuralError("fixed_point_subalgebra: map does not act on the algebra");
    if (!m.is_automorphism()) {
      std::ostringstream os;
      os << "fixed_point_subalgebra: map " << i << " is not a *-automorphism";
      throw DomainError(os.str());
    }
    // Scaled coordinates make the L2(tau) inner product Euclidean.
    const Matrix shifted = m.matrix() - Matrix::Identity(d, d);
    stacked.block(static_cast<Eigen::Index>(i) * d, 0, d, d) =
        s.cast<cplx>().asDiagonal() * shifted * s.cwiseInverse().cast<cplx>().asDiagonal();
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<AlgElement> basis;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (sv(i) > tol::kKernel) continue;
    const Vector v = svd.matrixV().col(i).cwiseQuotient(s.cast<cplx>());
    basis.push_back(from_coordinates(alg, v));
  }
  return Subalgebra(alg, std::move(basis));
}

ChannelOperator conditional_expectation(const Subalgebra& sub) {
  const auto& alg = sub.parent();
  const auto d = static_cast<Eigen::Index>(alg.dimension());
  Matrix b(d, static_cast<Eigen::Index>(sub.dimension()));
  for (std::size_t i = 0; i < sub.dimension(); ++i)
    b.col(static_cast<Eigen::Index>(i)) = to_coordinates(alg, sub.basis()[i]);
  Matrix p = b * b.adjoint() * alg.coordinate_weights().cast<cplx>().asDiagonal();
  ChannelOperator e(alg, std::move(p));

  const auto& f = e.flags();
  if (!f.unital || !f.trace_preserving || !f.self_adjoint || !f.positive)
    throw NumericError("conditional expectation failed unital/trace/self-adjoint/positivity certification");
  if (max_abs_diff(e.matrix() * e.matrix(), e.matrix()) > tol::kClosure)
    throw NumericError("conditional expectation is not idempotent");

  Rng rng(0xce11ULL);
  for (int s = 0; s < 4; ++s) {
    const auto x = random_element(alg, rng);
    const auto a = sub.project(random_element(alg, rng));
    const auto c = sub.project(random_element(alg, rng));
    const double scale = std::max(1.0, max_abs(a) * max_abs(x) * max_abs(c));
    if (max_abs(e(a * x * c) - a * e(x) * c) > tol::kClosure * scale)
      throw NumericError("conditional expectation violates the bimodule law");
  }
  return e;
}

}  // namespace ncerg
