#include <cmath>

#include "doctest.h"
#include "ncerg/cesaro.hpp"
#include "ncerg/random.hpp"

using namespace ncerg;

namespace {

AlgElement values(const TraceAlgebra& alg, const std::vector<double>& v) {
  std::vector<cplx> c(v.begin(), v.end());
  return AlgElement::diagonal(alg, c);
}

ChannelOperator trace_map(const TraceAlgebra& a) {
  return ChannelOperator::from_map(a, a, [&a](const AlgElement& x) { return trace(a, x) * AlgElement::identity(a); });
}

// S_4 acting on four points through a 4-cycle and a transposition
Action four_points() {
  const auto alg = TraceAlgebra::diagonal(4);
  return Action::group(Alphabet::group(2), alg,
                       {ChannelOperator::block_permutation(alg, {1, 2, 3, 0}),
                        ChannelOperator::block_permutation(alg, {1, 0, 2, 3})});
}

}  // namespace

TEST_CASE("Chebyshev family of the identity is constant") {
  const auto a = TraceAlgebra::matrix(2);
  const auto f = chebyshev_family(ChannelOperator::identity(a), 0.7, 6);
  CHECK(f.horizon() == 6);
  for (const auto& t : f.members) CHECK(max_abs_diff(t.matrix(), Matrix::Identity(4, 4)) < 1e-12);
  CHECK(f.markov_preserved);
  CHECK_THROWS_AS(chebyshev_family(ChannelOperator::identity(a), 0.5, 3), DomainError);
  CHECK_THROWS_AS(chebyshev_family(ChannelOperator::identity(a), 1.0, 3), DomainError);
}

TEST_CASE("free group spheres are a Chebyshev family") {
  Rng rng(1);
  const auto alg = TraceAlgebra::matrix(2);
  std::vector<ChannelOperator> gens;
  for (int g = 0; g < 2; ++g) gens.push_back(ChannelOperator::inner_automorphism(alg, random_unitary(alg, rng)));
  const auto action = Action::group(Alphabet::group(2), alg, gens);
  const auto chain = free_group_chain(2);
  const auto f = chebyshev_family(spherical_operator(action, chain, 1), 0.75, 5);
  for (int n = 0; n <= 5; ++n)
    CHECK(max_abs_diff(f.members[n].matrix(), spherical_operator(action, chain, n).matrix()) < 1e-12);
  for (double r : f.recursion) CHECK(r < 1e-12);
  for (double c : f.commutation) CHECK(c < 1e-12);
  // T_2 by hand
  const auto t1 = f.t1;
  const Matrix t2 = (t1.matrix() * t1.matrix() - 0.25 * Matrix::Identity(4, 4)) / 0.75;
  CHECK(max_abs_diff(f.members[2].matrix(), t2) < 1e-12);

  const auto x = random_element(alg, rng);
  auto want = AlgElement::zero(alg);
  for (int r = 0; r <= 3; ++r) want += 0.25 * f.members[r](x);
  CHECK(max_abs(mn_average(f, 3, x) - want) < 1e-13);
  CHECK(max_abs(mn_average(f, 0, x) - x) == 0.0);
  CHECK_THROWS_AS(mn_operator(f, 6), ResourceError);
}

TEST_CASE("domination constants") {
  Rng rng(2);
  const auto a = TraceAlgebra::matrix(2);
  const auto id = chebyshev_family(ChannelOperator::identity(a), 0.75, 6);
  const auto x = random_positive(a, rng) + 0.1 * AlgElement::identity(a);
  const auto d = domination_estimate(id, x, 2);
  CHECK(d.bounded);
  CHECK(d.c == doctest::Approx(1.0).epsilon(1e-6));

  const auto u = ChannelOperator::inner_automorphism(a, random_unitary(a, rng));
  const auto f = chebyshev_family(0.5 * (u + u.adjoint()), 0.75, 6);
  CHECK(domination_estimate(f, AlgElement::identity(a), 2).c == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(domination_estimate(f, -1.0 * AlgElement::identity(a), 1), DomainError);
}

TEST_CASE("power averages") {
  const auto a = TraceAlgebra::matrix(2);
  const auto p = power_average_operator(ChannelOperator::identity(a), 4);
  CHECK(max_abs_diff(p.matrix(), Matrix::Identity(4, 4)) < 1e-14);

  Rng rng(3);
  const auto x = random_element(a, rng);
  const auto same = semigroup_power_average(ChannelOperator::identity(a), x, 5);
  CHECK(max_abs(same.limit - x) < 1e-10);
  for (double dist : same.distance) CHECK(dist < 1e-10);

  // E x = tau(x) 1: avg_k = tau(x) 1 + (x - tau(x) 1) / k
  const auto e = semigroup_power_average(trace_map(a), x, 6);
  const auto centered = x - trace(a, x) * AlgElement::identity(a);
  CHECK(max_abs(e.limit - trace(a, x) * AlgElement::identity(a)) < 1e-10);
  for (int k = 1; k <= 6; ++k) CHECK(e.distance[k - 1] == doctest::Approx(lp_norm(a, centered, 2.0) / k));
  CHECK(e.fitted_c == doctest::Approx(lp_norm(a, centered, 2.0)));
  CHECK(e.nonincreasing_from <= 1);
  CHECK(e.fixed_residual < 1e-10);

  CHECK_THROWS_AS(semigroup_power_average(0.5 * ChannelOperator::identity(a), x, 3), HypothesisNotMet);
}

TEST_CASE("mean ergodic projection of a swap") {
  const auto a = TraceAlgebra::diagonal(2);
  const auto swap = ChannelOperator::block_permutation(a, {1, 0});
  const auto p = mean_ergodic_projection(swap);
  CHECK(max_abs(p(values(a, {3, 1})) - values(a, {2, 2})) < 1e-12);
}

TEST_CASE("l-infinity plus bounds") {
  const auto a = TraceAlgebra::diagonal(2);
  const auto b = linf_plus_bounds(a, {values(a, {1, 0}), values(a, {0, 1})}, 1.0);
  CHECK(b.lower == doctest::Approx(0.5));
  CHECK(b.upper == doctest::Approx(1.0));
}

TEST_CASE("limits of the direct-sum operator merge") {
  const auto action = four_points();
  const auto chain = free_group_chain(2);
  const auto& alg = action.algebra();
  const auto x = values(alg, {4, 0, 1, 3});
  const auto xhat = direct_sum_limit(action, chain, {x, x, x, x});
  const auto r = merge_limits_check(action, chain, xhat, 6);
  CHECK(r.probe.irreducible);
  CHECK(r.merged);
  CHECK(r.fixed_residual < 1e-10);
  // S_4 is transitive: the common limit is the mean
  for (const auto& y : xhat) CHECK(max_abs(y - 2.0 * AlgElement::identity(alg)) < 1e-9);
  CHECK_THROWS_AS(merge_limits_check(action, chain, {x, x, x, x}, 6), DomainError);
}

TEST_CASE("merging needs an irreducible chain") {
  const auto alg = TraceAlgebra::diagonal(2);
  const auto a = Alphabet::semigroup(2);
  const auto action = Action::semigroup(a, alg, {ChannelOperator::identity(alg), ChannelOperator::identity(alg)});
  const SphereChain stuck(a, RealMatrix::Identity(2, 2), RealVector::Constant(2, 0.5));
  const auto one = AlgElement::identity(alg);
  CHECK_THROWS_AS(merge_limits_check(action, stuck, {one, one}, 4), HypothesisNotMet);
}
