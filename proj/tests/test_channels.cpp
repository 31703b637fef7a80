#include <cmath>

#include "doctest.h"
#include "ncerg/channels.hpp"
#include "ncerg/expectation.hpp"

using namespace ncerg;

namespace {

TraceAlgebra mixed() { return TraceAlgebra({{2, 0.3}, {1, 0.4}}, true); }

ChannelOperator transpose_map(const TraceAlgebra& a) {
  return ChannelOperator::from_map(a, a, [](const AlgElement& x) {
    std::vector<Matrix> b;
    for (const auto& m : x.blocks()) b.push_back(m.transpose());
    return AlgElement(std::move(b));
  });
}

// x -> tau(x) 1 on a normalized algebra
ChannelOperator trace_map(const TraceAlgebra& a) {
  return ChannelOperator::from_map(a, a, [&a](const AlgElement& x) { return trace(a, x) * AlgElement::identity(a); });
}

}  // namespace

TEST_CASE("flags of standard maps") {
  const auto a = TraceAlgebra::matrix(2);
  Rng rng(1);
  const auto id = ChannelOperator::identity(a);
  CHECK(id.is_markov());
  CHECK(id.is_automorphism());
  CHECK(id.is_completely_positive());

  const auto ad = ChannelOperator::inner_automorphism(a, random_unitary(a, rng));
  CHECK(ad.is_automorphism());
  CHECK(ad.is_markov());

  const auto t = transpose_map(a);
  CHECK(t.is_positive());
  CHECK_FALSE(t.is_completely_positive());
  // Choi matrix of the transpose is the swap
  CHECK(choi_matrix(t).min_eigenvalue == doctest::Approx(-1.0));

  const auto e = trace_map(a);
  CHECK(e.is_markov());
  CHECK(e.is_self_adjoint());
  CHECK_FALSE(e.is_automorphism());
}

TEST_CASE("adjoint is the Hilbert-Schmidt adjoint for tau") {
  Rng rng(2);
  const auto a = mixed();
  const auto t = ChannelOperator(a, Matrix::Random(5, 5));
  const auto ts = t.adjoint();
  for (int s = 0; s < 5; ++s) {
    const auto x = random_element(a, rng), y = random_element(a, rng);
    CHECK(std::abs(inner(a, t(x), y) - inner(a, x, ts(y))) < 1e-12);
  }
  CHECK(max_abs_diff(ts.adjoint().matrix(), t.matrix()) < 1e-14);
}

TEST_CASE("composition order and arithmetic") {
  Rng rng(3);
  const auto a = TraceAlgebra::matrix(2);
  const auto u = ChannelOperator::inner_automorphism(a, random_unitary(a, rng));
  const auto v = ChannelOperator::inner_automorphism(a, random_unitary(a, rng));
  const auto x = random_element(a, rng);
  CHECK(max_abs((u * v)(x) - u(v(x))) < 1e-13);
  CHECK(max_abs((0.5 * u + 0.5 * v)(x) - 0.5 * (u(x) + v(x))) < 1e-13);
  CHECK(max_abs_diff(power(u, 3).matrix(), (u * u * u).matrix()) < 1e-13);
}

TEST_CASE("block permutation") {
  const auto a = TraceAlgebra::diagonal(3);
  const auto p = ChannelOperator::block_permutation(a, {1, 2, 0});
  const auto x = AlgElement::diagonal(a, {cplx(1), cplx(2), cplx(3)});
  CHECK(max_abs(p(x) - AlgElement::diagonal(a, {cplx(3), cplx(1), cplx(2)})) == 0.0);
  CHECK(p.is_automorphism());
  CHECK_THROWS_AS(ChannelOperator::block_permutation(a, {0, 0, 1}), DomainError);
  CHECK_THROWS_AS(ChannelOperator::block_permutation(mixed(), {1, 0}), DomainError);
}

TEST_CASE("conditional expectation onto a fixed-point algebra") {
  const auto a = TraceAlgebra::matrix(3);
  const auto phase = AlgElement::diagonal(a, {cplx(1), cplx(0, 1), cplx(-1)});
  const auto sub = fixed_point_subalgebra({ChannelOperator::inner_automorphism(a, phase)}, a);
  CHECK(sub.dimension() == 3);  // the diagonal
  const auto e = conditional_expectation(sub);
  Rng rng(4);
  const auto x = random_element(a, rng);
  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() = x.block(0).diagonal();
  CHECK(max_abs(e(x) - AlgElement({diag})) < 1e-12);
  CHECK(max_abs_diff((e * e).matrix(), e.matrix()) < 1e-12);
  CHECK(e.is_markov());

  CHECK(fixed_point_subalgebra({}, a).dimension() == 9);
  CHECK_THROWS_AS(fixed_point_subalgebra({trace_map(a)}, a), DomainError);
}

TEST_CASE("subalgebra validation") {
  const auto a = TraceAlgebra::matrix(2);
  Matrix e12 = Matrix::Zero(2, 2);
  e12(0, 1) = 1.0;
  // span{1, E_12} is not closed under the adjoint
  CHECK_THROWS_AS(Subalgebra::span(a, {AlgElement::identity(a), AlgElement({e12})}), DomainError);
  CHECK(Subalgebra::scalars(a).dimension() == 1);
}

TEST_CASE("Markov certification and Dunford-Schwartz") {
  const auto a = mixed();
  Rng rng(5);
  const auto t = ChannelOperator::combination(
      {0.25, 0.75}, {ChannelOperator::inner_automorphism(a, random_unitary(a, rng)),
                     ChannelOperator::inner_automorphism(a, random_unitary(a, rng))});
  const auto r = certify_markov(t);
  CHECK(r.markov);
  CHECK(r.linf_contraction);
  CHECK(r.l1_contraction);
  CHECK(r.l2_norm <= 1.0 + 1e-12);
  CHECK(r.l2_norm >= 1.0 - 1e-12);  // T(1) = 1

  const auto ds = dunford_schwartz_check(t, 20, {OrliczFunction::llogl(), OrliczFunction::power(3.0)}, rng);
  CHECK(ds.holds);

  const auto tr = transpose_map(TraceAlgebra::matrix(2));
  CHECK_FALSE(certify_markov(tr).flags.completely_positive);
}

TEST_CASE("ancilla dilation") {
  Rng rng(6);
  const auto base = TraceAlgebra::matrix(2);
  const auto anc = TraceAlgebra::matrix(2);
  const auto big = tensor(base, anc);
  const auto emb = ancilla_embedding(base, anc);
  const auto exp = ancilla_expectation(base, anc);
  const auto x = random_element(base, rng);
  CHECK(max_abs(exp(emb(x)) - x) < 1e-13);

  const auto t = factorized_channel({base, anc, random_unitary(big, rng)});
  CHECK(t.is_markov());
  CHECK(t.is_completely_positive());
  REQUIRE(t.factorization() != nullptr);

  // swap unitary: T(x) = tau(x) 1
  Matrix swap = Matrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) swap(2 * i + j, 2 * j + i) = 1.0;
  const auto s = factorized_channel({base, anc, AlgElement({swap})});
  CHECK(max_abs(s(x) - trace(base, x) * AlgElement::identity(base)) < 1e-13);

  CHECK_THROWS_AS(factorized_channel({base, anc, AlgElement({Matrix::Ones(4, 4)})}), DomainError);
  CHECK_THROWS_AS(factorized_channel({base, TraceAlgebra({{2, 1.0}}, false), AlgElement({swap})}), DomainError);
}

TEST_CASE("Rota sequence closed forms") {
  Rng rng(7);
  const auto a = TraceAlgebra::matrix(3);
  const auto e = trace_map(a);
  const auto x = random_element(a, rng);
  const auto r = rota_sequence(e, x, 4);
  for (int n = 1; n <= 4; ++n) CHECK(max_abs(r.mirrored[static_cast<std::size_t>(n)] - e(x)) < 1e-13);
  CHECK(r.forward_steps[1] < 1e-13);

  const auto u = ChannelOperator::inner_automorphism(a, random_unitary(a, rng));
  const auto ru = rota_sequence(u, x, 4);
  for (int n = 0; n <= 4; ++n) CHECK(max_abs(ru.mirrored[static_cast<std::size_t>(n)] - x) < 1e-12);
  CHECK_THROWS_AS(rota_sequence(u, x, 0), DomainError);
}

TEST_CASE("nested shift realization") {
  const auto nr = nested_shift_realization(2, 2, 2, 5);
  CHECK(nr.alg.dimension() == 64);
  CHECK(nr.t.is_markov());
  Rng rng(8);
  const auto r = rota_sequence(nr.t, random_element(nr.alg, rng), 5, nr.expectations);
  CHECK(r.nested_ok);
  CHECK(r.nested_residuals.size() == 5);
  CHECK_THROWS_AS(nested_shift_realization(3, 2, 4, 2), ResourceError);
}

TEST_CASE("Kadison-Schwarz inequality") {
  Rng rng(9);
  const auto a = mixed();
  const auto t = ChannelOperator::combination(
      {0.5, 0.5}, {ChannelOperator::inner_automorphism(a, random_unitary(a, rng)), ChannelOperator::identity(a)});
  const auto k = kadison_check(t, 30, rng);
  CHECK(k.violations == 0);
  CHECK(k.worst > -1e-12);
  CHECK_THROWS_AS(kadison_check(transpose_map(TraceAlgebra::matrix(2)), 3, rng), HypothesisNotMet);
}
