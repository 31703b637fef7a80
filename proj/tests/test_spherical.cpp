#include <cmath>

#include "doctest.h"
#include "ncerg/random.hpp"
#include "ncerg/spherical.hpp"

using namespace ncerg;

namespace {

// alpha(x)_j = x_{j-1} on Z_n, a single generator
Action cyclic(int n) {
  const auto alg = TraceAlgebra::diagonal(n);
  std::vector<int> perm;
  for (int k = 0; k < n; ++k) perm.push_back((k + 1) % n);
  return Action::group(Alphabet::group(1), alg, {ChannelOperator::block_permutation(alg, perm)});
}

Action random_group_action(const TraceAlgebra& alg, int m, Rng& rng) {
  std::vector<ChannelOperator> gens;
  for (int g = 0; g < m; ++g) gens.push_back(ChannelOperator::inner_automorphism(alg, random_unitary(alg, rng)));
  return Action::group(Alphabet::group(m), alg, std::move(gens));
}

AlgElement values(const TraceAlgebra& alg, const std::vector<double>& v) {
  std::vector<cplx> c(v.begin(), v.end());
  return AlgElement::diagonal(alg, c);
}

}  // namespace

TEST_CASE("one generator: S_n is the two-sided shift average") {
  const int n_pts = 7;
  const auto action = cyclic(n_pts);
  const auto chain = free_group_chain(1);
  const std::vector<double> v{3, -1, 4, 1, -5, 9, 2};
  const auto x = values(action.algebra(), v);
  for (int n = 0; n <= 9; ++n) {
    std::vector<double> expect(n_pts);
    for (int j = 0; j < n_pts; ++j)
      expect[j] = 0.5 * (v[((j - n) % n_pts + n_pts) % n_pts] + v[(j + n) % n_pts]);
    const auto want = values(action.algebra(), expect);
    CHECK(max_abs(spherical_avg_recursive(action, chain, n, x) - want) < 1e-14);
    CHECK(max_abs(spherical_avg_bruteforce(action, chain, n, x) - want) < 1e-14);
  }
}

TEST_CASE("recursion agrees with enumeration") {
  Rng rng(1);
  const auto alg = TraceAlgebra({{2, 0.3}, {1, 0.4}}, true);
  for (int m : {2, 3}) {
    const auto action = random_group_action(alg, m, rng);
    const auto chain = free_group_chain(m);
    const auto x = random_element(alg, rng);
    for (int n = 0; n <= 4; ++n) {
      CHECK(max_abs(spherical_avg_recursive(action, chain, n, x) - spherical_avg_bruteforce(action, chain, n, x)) <
            1e-12);
      CHECK(max_abs(spherical_operator(action, chain, n)(x) - spherical_avg_recursive(action, chain, n, x)) < 1e-12);
    }
    CHECK(diagonal_identity_residual(action, chain, 4, x) < 1e-12);
    // partial averages add up
    auto sum = AlgElement::zero(alg);
    for (int l : chain.alphabet().letters()) sum += partial_spherical(action, chain, 3, l, x);
    CHECK(max_abs(sum - spherical_avg_bruteforce(action, chain, 3, x)) < 1e-12);
  }
}

TEST_CASE("semigroup walk") {
  Rng rng(2);
  const auto alg = TraceAlgebra::matrix(2);
  std::vector<ChannelOperator> maps;
  for (int i = 0; i < 2; ++i) maps.push_back(ChannelOperator::inner_automorphism(alg, random_unitary(alg, rng)));
  const auto action = Action::semigroup(Alphabet::semigroup(2), alg, maps);
  const auto chain = uniform_semigroup_chain(2);
  const auto x = random_element(alg, rng);
  // S_2 = ((a1 + a2) / 2)^2 for the uniform walk
  const auto s1 = 0.5 * (maps[0] + maps[1]);
  CHECK(max_abs(spherical_avg_recursive(action, chain, 2, x) - (s1 * s1)(x)) < 1e-13);
  CHECK(max_abs(spherical_avg_bruteforce(action, chain, 2, x) - (s1 * s1)(x)) < 1e-13);
  CHECK_THROWS_AS(involution_U(action, chain), DomainError);
}

TEST_CASE("direct sum operator") {
  Rng rng(3);
  const auto alg = TraceAlgebra({{2, 0.3}, {1, 0.4}}, true);
  const auto action = random_group_action(alg, 2, rng);
  const auto chain = free_group_chain(2);
  const auto ds = direct_sum(alg, chain);
  CHECK(ds.parts == 4);
  CHECK(ds.sum.unit_trace() == doctest::Approx(1.0));
  const auto t = direct_sum_T(action, chain);
  CHECK(t.is_markov());
  std::vector<AlgElement> xs;
  for (int i = 0; i < 4; ++i) xs.push_back(random_element(alg, rng));
  const auto fast = direct_sum_apply(action, chain, xs);
  const auto slow = ds.unpack(t(ds.pack(xs)));
  for (int i = 0; i < 4; ++i) CHECK(max_abs(fast[i] - slow[i]) < 1e-13);
  CHECK(weighted_norm(ds, xs, 2.0) == doctest::Approx(lp_norm(ds.sum, ds.pack(xs), 2.0)));

  const auto inv = check_involution(action, chain);
  CHECK(inv.square_residual < 1e-13);
  CHECK(inv.symmetry_residual < 1e-13);

  const auto c = contraction_check(action, chain, 3.0, 50, rng);
  CHECK(c.violations == 0);
  CHECK(c.positivity);
  CHECK(c.worst_ratio <= 1.0 + 1e-12);
}

TEST_CASE("even-radius relations") {
  Rng rng(4);
  const auto alg = TraceAlgebra::matrix(2);
  const auto action = random_group_action(alg, 2, rng);
  const auto chain = free_group_chain(2);
  const auto r = check_relation_even(action, chain, 4);
  CHECK(r.first_holds);
  CHECK(r.second_sign == "-");
  CHECK(*std::max_element(r.second_plus.begin(), r.second_plus.end()) > 1e-3);
  CHECK_THROWS_AS(check_relation_even(cyclic(5), free_group_chain(1), 3), DomainError);

  const auto s = check_s1sq_identity(action, chain, 4, 8);
  for (double v : s.square) CHECK(v < 1e-12);
  for (double v : s.recursion) CHECK(v < 1e-12);
}

TEST_CASE("Cesaro averages") {
  Rng rng(5);
  const auto alg = TraceAlgebra::matrix(2);
  const auto action = random_group_action(alg, 2, rng);
  const auto chain = free_group_chain(2);
  const auto x = random_element(alg, rng);
  const auto c = cesaro_average(action, chain, 4, x);
  auto want = AlgElement::zero(alg);
  for (int k = 0; k < 4; ++k) want += 0.25 * spherical_avg_bruteforce(action, chain, k, x);
  CHECK(max_abs(c.total - want) < 1e-13);
  CHECK(max_abs(cesaro_operator(action, chain, 4)(x) - want) < 1e-13);
  CHECK(c.parts.size() == 4);
  CHECK_THROWS_AS(cesaro_average(action, chain, 0, x), DomainError);
}

TEST_CASE("even fixed-point expectation") {
  // on Z_4 even shifts keep parity classes apart
  const auto a4 = cyclic(4);
  const auto e = even_fixed_expectation(a4);
  const auto x = values(a4.algebra(), {1, 2, 5, 10});
  CHECK(max_abs(e(x) - values(a4.algebra(), {3, 6, 3, 6})) < 1e-12);
  // on Z_5 they are transitive
  const auto a5 = cyclic(5);
  const auto y = values(a5.algebra(), {1, 2, 3, 4, 5});
  CHECK(max_abs(even_fixed_expectation(a5)(y) - 3.0 * AlgElement::identity(a5.algebra())) < 1e-12);
}

TEST_CASE("even spheres converge on Z_5") {
  const auto action = cyclic(5);
  const auto chain = free_group_chain(1);
  const auto x = values(action.algebra(), {1, 0, 0, 0, 0});
  const auto rep = converge_even_spheres(action, chain, x, 3, {OrliczFunction::llogl()}, 1e-6);
  CHECK(rep.rows.size() == 3);
  CHECK(rep.rows[1].n == 4);
  CHECK_FALSE(rep.n_star.has_value());  // the shift average on Z_5 does not decay
  const auto csv = rep.to_csv();
  CHECK(csv.rfind("n,err_inf,err_l2,err_llogl\n", 0) == 0);
  CHECK(rep.summary().find("not reached") != std::string::npos);
}

TEST_CASE("b.a.u certificate") {
  const auto alg = TraceAlgebra::diagonal(4);
  const auto limit = AlgElement::zero(alg);
  std::vector<AlgElement> seq;
  for (int n = 1; n <= 5; ++n) seq.push_back(values(alg, {1.0, 0.5 / (n * n), 0, 0}));
  const auto loose = bau_certificate(alg, seq, limit, 0.25);
  CHECK(loose.defect == doctest::Approx(0.25));
  CHECK(loose.residual == doctest::Approx(0.5));  // point 1 still lags at n = 1
  const auto tight = bau_certificate(alg, seq, limit, 0.1);
  CHECK(tight.defect == 0.0);
  CHECK(tight.residual == doctest::Approx(1.0));
  const auto wide = bau_certificate(alg, seq, limit, 0.5);
  CHECK(wide.residual == doctest::Approx(0.0));
  CHECK_THROWS_AS(bau_certificate(alg, seq, limit, -1.0), DomainError);
}

TEST_CASE("brute-force guard") {
  const auto action = cyclic(3);
  const auto x = AlgElement::identity(action.algebra());
  CHECK_THROWS_AS(spherical_avg_bruteforce(action, free_group_chain(1), 5, x, 1), ResourceError);
  CHECK_THROWS_AS(spherical_avg_bruteforce(action, free_group_chain(1), -1, x), DomainError);
}

TEST_CASE("format_double keeps 17 digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
}
