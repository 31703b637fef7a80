#include "ncerg/random.hpp"

#include <cmath>

namespace ncerg {

namespace {

Matrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

}  // namespace

Matrix random_unitary(int n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(ginibre(n, n, rng));
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

AlgElement random_unitary(const TraceAlgebra& alg, Rng& rng) {
  std::vector<Matrix> blocks;
  for (const auto& b : alg.blocks()) blocks.push_back(random_unitary(b.dim, rng));
  return AlgElement(std::move(blocks));
}

AlgElement random_element(const TraceAlgebra& alg, Rng& rng) {
  std::vector<Matrix> blocks;
  for (const auto& b : alg.blocks()) blocks.push_back(ginibre(b.dim, b.dim, rng));
  return AlgElement(std::move(blocks));
}

AlgElement random_self_adjoint(const TraceAlgebra& alg, Rng& rng) {
  auto x = random_element(alg, rng);
  return 0.5 * (x + x.adjoint());
}

AlgElement random_positive(const TraceAlgebra& alg, Rng& rng) {
  auto g = random_element(alg, rng);
  return g * g.adjoint();
}

AlgElement random_effect(const TraceAlgebra& alg, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Matrix> blocks;
  for (const auto& b : alg.blocks()) {
    Matrix u = random_unitary(b.dim, rng);
    RealVector ev(b.dim);
    for (int i = 0; i < b.dim; ++i) ev(i) = unif(rng);
    blocks.push_back(u * ev.cast<cplx>().asDiagonal() * u.adjoint());
  }
  return AlgElement(std::move(blocks));
}

}  // namespace ncerg
