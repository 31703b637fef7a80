#include "ncerg/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncerg/random.hpp"

namespace ncerg {

ChannelOperator::ChannelOperator(TraceAlgebra domain, TraceAlgebra codomain, Matrix matrix)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != static_cast<Eigen::Index>(codomain_.dimension()) ||
      matrix_.cols() != static_cast<Eigen::Index>(domain_.dimension()))
    throw StructuralError("channel matrix shape does not match domain/codomain dimensions");
}

ChannelOperator ChannelOperator::identity(const TraceAlgebra& alg) {
  const auto d = static_cast<Eigen::Index>(alg.dimension());
  return ChannelOperator(alg, Matrix::Identity(d, d));
}

ChannelOperator ChannelOperator::from_map(const TraceAlgebra& domain, const TraceAlgebra& codomain,
                                          const std::function<AlgElement(const AlgElement&)>& f) {
  Matrix m(static_cast<Eigen::Index>(codomain.dimension()), static_cast<Eigen::Index>(domain.dimension()));
  for (std::size_t k = 0; k < domain.block_count(); ++k) {
    const int n = domain.block_dim(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto unit = AlgElement::zero(domain);
        unit.block(k)(i, j) = 1.0;
        m.col(static_cast<Eigen::Index>(domain.offset(k)) + i * n + j) = to_coordinates(codomain, f(unit));
      }
  }
  return ChannelOperator(domain, codomain, std::move(m));
}

ChannelOperator ChannelOperator::inner_automorphism(const TraceAlgebra& alg, const AlgElement& u) {
  require_shape(alg, u);
  const auto d = static_cast<Eigen::Index>(alg.dimension());
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    const Matrix& uk = u.block(k);
    const Eigen::Index n2 = uk.rows() * uk.rows();
    const auto off = static_cast<Eigen::Index>(alg.offset(k));
    // row-major vec(u X u^*) = (u kron conj(u)) vec(X)
    m.block(off, off, n2, n2) = kron(uk, uk.conjugate());
  }
  return ChannelOperator(alg, std::move(m));
}

ChannelOperator ChannelOperator::block_permutation(const TraceAlgebra& alg, const std::vector<int>& perm) {
  const std::size_t nb = alg.block_count();
  if (perm.size() != nb) throw DomainError("permutation length does not match the block count");
  std::vector<bool> seen(nb, false);
  for (std::size_t k = 0; k < nb; ++k) {
    const int t = perm[k];
    if (t < 0 || static_cast<std::size_t>(t) >= nb || seen[static_cast<std::size_t>(t)])
      throw DomainError("block map is not a permutation");
    seen[static_cast<std::size_t>(t)] = true;
    if (!(alg.blocks()[k] == alg.blocks()[static_cast<std::size_t>(t)]))
      throw DomainError("permuted blocks must share dimension and weight");
  }
  const auto d = static_cast<Eigen::Index>(alg.dimension());
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < nb; ++k) {
    const auto t = static_cast<std::size_t>(perm[k]);
    const Eigen::Index n2 = alg.block_dim(k) * alg.block_dim(k);
    m.block(static_cast<Eigen::Index>(alg.offset(t)), static_cast<Eigen::Index>(alg.offset(k)), n2, n2).setIdentity();
  }
  return ChannelOperator(alg, std::move(m));
}

ChannelOperator ChannelOperator::combination(const std::vector<double>& coeffs,
                                             const std::vector<ChannelOperator>& ops) {
  if (coeffs.size() != ops.size() || ops.empty())
    throw StructuralError("combination needs one coefficient per operator");
  Matrix m = coeffs[0] * ops[0].matrix();
  for (std::size_t i = 1; i < ops.size(); ++i) {
    if (!(ops[i].domain() == ops[0].domain()) || !(ops[i].codomain() == ops[0].codomain()))
      throw StructuralError("combined operators act between different algebras");
    m += coeffs[i] * ops[i].matrix();
  }
  return ChannelOperator(ops[0].domain(), ops[0].codomain(), std::move(m));
}

AlgElement ChannelOperator::operator()(const AlgElement& x) const {
  return from_coordinates(codomain_, matrix_ * to_coordinates(domain_, x));
}

Matrix weighted_adjoint(const Matrix& a, const RealVector& domain_weights, const RealVector& codomain_weights) {
  Matrix out(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < a.rows(); ++j)
      out(i, j) = std::conj(a(j, i)) * (codomain_weights(j) / domain_weights(i));
  return out;
}

ChannelOperator ChannelOperator::adjoint() const {
  ChannelOperator out;
  out.domain_ = codomain_;
  out.codomain_ = domain_;
  out.matrix_ = adjoint_matrix_ ? *adjoint_matrix_
                                : weighted_adjoint(matrix_, domain_.coordinate_weights(),
                                                   codomain_.coordinate_weights());
  out.adjoint_matrix_ = std::make_shared<const Matrix>(matrix_);
  return out;
}

ChannelOperator operator*(const ChannelOperator& a, const ChannelOperator& b) {
  if (!(a.domain() == b.codomain())) throw StructuralError("composition of incompatible channels");
  return ChannelOperator(b.domain(), a.codomain(), a.matrix() * b.matrix());
}

ChannelOperator operator+(const ChannelOperator& a, const ChannelOperator& b) {
  return ChannelOperator::combination({1.0, 1.0}, {a, b});
}

ChannelOperator operator-(const ChannelOperator& a, const ChannelOperator& b) {
  return ChannelOperator::combination({1.0, -1.0}, {a, b});
}

ChannelOperator operator*(double c, const ChannelOperator& a) {
  return ChannelOperator(a.domain(), a.codomain(), c * a.matrix());
}

ChannelOperator power(const ChannelOperator& t, int n) {
  if (n < 0) throw DomainError("negative channel power");
  if (!t.is_endomorphism()) throw StructuralError("power of a non-endomorphism");
  Matrix m = Matrix::Identity(t.matrix().rows(), t.matrix().cols());
  for (int i = 0; i < n; ++i) m = t.matrix() * m;
  return ChannelOperator(t.domain(), std::move(m));
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw StructuralError("matrix shapes differ");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

ChoiMatrix choi_matrix(const ChannelOperator& t) {
  const auto& dom = t.domain();
  const auto& cod = t.codomain();
  ChoiMatrix out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dom.block_count(); ++k) {
    const int n = dom.block_dim(k);
    for (std::size_t l = 0; l < cod.block_count(); ++l) {
      const int m = cod.block_dim(l);
      Matrix c = Matrix::Zero(n * m, n * m);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Eigen::Index col = static_cast<Eigen::Index>(dom.offset(k)) + i * n + j;
          const auto off = static_cast<Eigen::Index>(cod.offset(l));
          for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) c(i * m + a, j * m + b) = t.matrix()(off + a * m + b, col);
        }
      const Matrix h = 0.5 * (c + c.adjoint());
      Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
      double mn = es.eigenvalues().minCoeff();
      // A non-Hermitian Choi block cannot be PSD.
      if ((c - c.adjoint()).cwiseAbs().maxCoeff() > tol::kFlag) mn = std::min(mn, -1.0);
      out.min_eigenvalue = std::min(out.min_eigenvalue, mn);
      out.blocks.push_back(c);
    }
  }
  return out;
}

namespace {

RealVector trace_functional(const TraceAlgebra& alg) {
  RealVector t = RealVector::Zero(static_cast<Eigen::Index>(alg.dimension()));
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    const int n = alg.block_dim(k);
    for (int i = 0; i < n; ++i) t(static_cast<Eigen::Index>(alg.offset(k)) + i * n + i) = alg.weight(k);
  }
  return t;
}

ChannelFlags compute_flags(const ChannelOperator& t) {
  ChannelFlags f;
  const auto& dom = t.domain();
  const auto& cod = t.codomain();
  const Matrix& m = t.matrix();

  const auto image_of_one = t(AlgElement::identity(dom));
  f.unital_residual = max_abs(image_of_one - AlgElement::identity(cod));
  f.unital = f.unital_residual <= tol::kFlag;

  const RealVector td = trace_functional(dom);
  const RealVector tc = trace_functional(cod);
  const Vector lhs = m.transpose() * tc.cast<cplx>();
  f.trace_residual = (lhs - td.cast<cplx>()).cwiseAbs().maxCoeff();
  f.trace_preserving = f.trace_residual <= tol::kFlag;

  f.choi_min_eigenvalue = choi_matrix(t).min_eigenvalue;
  f.completely_positive = f.choi_min_eigenvalue >= -tol::kFlag;

  // Positivity on rank-one projections: matrix units plus seeded random pure states.
  Rng rng(0x5eedf00dULL);
  double worst = std::numeric_limits<double>::infinity();
  bool hermiticity = true;
  for (std::size_t k = 0; k < dom.block_count() && hermiticity; ++k) {
    const int n = dom.block_dim(k);
    std::vector<Vector> states;
    for (int i = 0; i < n; ++i) states.push_back(Vector::Unit(n, i));
    for (int s = 0; s < 32; ++s) states.push_back(random_unitary(n, rng).col(0));
    for (const auto& v : states) {
      auto p = AlgElement::zero(dom);
      p.block(k) = v * v.adjoint();
      const auto img = t(p);
      if (!is_self_adjoint(img, tol::kFlag)) {
        hermiticity = false;
        worst = -1.0;
        break;
      }
      worst = std::min(worst, min_eigenvalue(img));
    }
  }
  f.positivity_min_eigenvalue = worst;
  f.positive = f.completely_positive || (hermiticity && worst >= -tol::kFlag);

  if (t.is_endomorphism()) {
    const Matrix adj = weighted_adjoint(m, dom.coordinate_weights(), cod.coordinate_weights());
    f.adjoint_residual = max_abs_diff(m, adj);
    f.self_adjoint = f.adjoint_residual <= tol::kFlag;

    double mult = 0.0;
    for (int s = 0; s < 6; ++s) {
      const auto x = random_element(dom, rng);
      const auto y = random_element(dom, rng);
      const double scale = std::max(1.0, max_abs(x) * max_abs(y));
      mult = std::max(mult, max_abs(t(x * y) - t(x) * t(y)) / scale);
      mult = std::max(mult, max_abs(t(x.adjoint()) - t(x).adjoint()) / std::max(1.0, max_abs(x)));
    }
    f.multiplicative_residual = mult;
    Eigen::JacobiSVD<Matrix> svd(m);
    const double smallest = svd.singularValues().size() ? svd.singularValues().minCoeff() : 0.0;
    f.automorphism = f.unital && mult <= tol::kMultiplicative && smallest > tol::kKernel;
  }
  return f;
}

}  // namespace

const ChannelFlags& ChannelOperator::flags() const {
  std::call_once(cache_->once, [this] { cache_->flags = compute_flags(*this); });
  return cache_->flags;
}

}  // namespace ncerg
