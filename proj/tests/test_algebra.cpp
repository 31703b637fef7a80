#include <cmath>

#include "doctest.h"
#include "ncerg/algebra.hpp"
#include "ncerg/random.hpp"

using namespace ncerg;

namespace {

TraceAlgebra mixed() { return TraceAlgebra({{2, 0.3}, {1, 0.4}}, true); }

}  // namespace

TEST_CASE("trace algebra layout") {
  const auto a = mixed();
  CHECK(a.dimension() == 5);
  CHECK(a.offset(1) == 4);
  CHECK(a.unit_trace() == doctest::Approx(1.0));
  CHECK_THROWS_AS(TraceAlgebra({{2, 0.3}}, true), DomainError);
  CHECK_THROWS_AS(TraceAlgebra({{0, 1.0}}, false), DomainError);
  CHECK(TraceAlgebra::matrix(4).weight(0) == doctest::Approx(0.25));
}

TEST_CASE("coordinates round trip and the trace") {
  Rng rng(1);
  const auto a = mixed();
  const auto x = random_element(a, rng);
  CHECK(max_abs(from_coordinates(a, to_coordinates(a, x)) - x) == 0.0);
  // tau = 0.3 Tr(block 0) + 0.4 Tr(block 1), by hand
  const cplx expected = 0.3 * x.block(0).trace() + 0.4 * x.block(1).trace();
  CHECK(std::abs(trace(a, x) - expected) < 1e-14);
  const auto y = random_element(a, rng);
  CHECK(std::abs(inner(a, x, y) - trace(a, y.adjoint() * x)) < 1e-13);
}

TEST_CASE("kron matches the definition") {
  Matrix a(2, 2), b(2, 1);
  a << 1, 2, 3, 4;
  b << 5, cplx(0, 1);
  const Matrix k = kron(a, b);
  CHECK(k.rows() == 4);
  CHECK(k(3, 1) == cplx(0, 4));
  CHECK(k(2, 0) == cplx(15, 0));
}

TEST_CASE("tensor of normalized algebras stays normalized") {
  const auto t = tensor(TraceAlgebra::matrix(2), TraceAlgebra::diagonal(3));
  CHECK(t.block_count() == 3);
  CHECK(t.block_dim(0) == 2);
  CHECK(t.unit_trace() == doctest::Approx(1.0));
}

TEST_CASE("spectral tools on a diagonal element") {
  const auto a = TraceAlgebra::matrix(3);
  const auto x = AlgElement::diagonal(a, {cplx(3), cplx(-1), cplx(3)});
  const auto spec = spectral_decomposition(a, x);
  REQUIRE(spec.size() == 2);
  CHECK(spec[0].eigenvalue == doctest::Approx(-1.0));
  CHECK(trace(a, spec[1].projection).real() == doctest::Approx(2.0 / 3.0));
  CHECK(operator_norm(x) == doctest::Approx(3.0));
  CHECK(min_eigenvalue(x) == doctest::Approx(-1.0));
  CHECK_FALSE(is_positive(x));
  CHECK(max_abs(absolute_value(a, x) - AlgElement::diagonal(a, {cplx(3), cplx(1), cplx(3)})) < 1e-14);
  // ||x||_2^2 = (9 + 1 + 9) / 3
  CHECK(lp_norm(a, x, 2.0) == doctest::Approx(std::sqrt(19.0 / 3.0)));
  CHECK(lp_norm(a, x, INFINITY) == doctest::Approx(3.0));
  const auto p = spectral_projection(a, x, Interval::closed(0.0, 5.0));
  CHECK(trace(a, p).real() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("functional calculus agrees with squaring") {
  Rng rng(2);
  const auto a = mixed();
  const auto h = random_self_adjoint(a, rng);
  const auto sq = functional_calculus(a, h, [](double t) { return t * t; });
  CHECK(max_abs(sq - h * h) < 1e-12);
}

TEST_CASE("lp norms: Holder-type sanity on random elements") {
  Rng rng(3);
  const auto a = mixed();
  for (int s = 0; s < 20; ++s) {
    const auto x = random_element(a, rng);
    // normalized trace: ||x||_p is nondecreasing in p
    CHECK(lp_norm(a, x, 1.0) <= lp_norm(a, x, 2.0) + 1e-12);
    CHECK(lp_norm(a, x, 2.0) <= lp_norm(a, x, 4.0) + 1e-12);
    CHECK(lp_norm(a, x, 4.0) <= operator_norm(x) + 1e-12);
  }
}

TEST_CASE("half projection bound") {
  Rng rng(4);
  const auto a = mixed();
  for (int s = 0; s < 50; ++s) {
    const auto b = random_effect(a, rng);
    const auto hp = half_projection(a, b);
    CHECK(hp.defect <= hp.bound + 1e-12);
    CHECK(max_abs(b * hp.right_inverse - hp.projection) < 1e-9);
    CHECK(operator_norm(hp.right_inverse) <= 2.0 + 1e-9);
  }
}

TEST_CASE("random helpers produce what they claim") {
  Rng rng(5);
  const auto a = mixed();
  const auto u = random_unitary(a, rng);
  CHECK(max_abs(u.adjoint() * u - AlgElement::identity(a)) < 1e-12);
  CHECK(is_positive(random_positive(a, rng)));
  const auto e = random_effect(a, rng);
  CHECK(is_positive(e));
  CHECK(is_positive(AlgElement::identity(a) - e));
  CHECK_THROWS_AS(require_shape(a, AlgElement::zero(TraceAlgebra::matrix(2))), StructuralError);
}
