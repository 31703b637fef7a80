#include <set>

#include "doctest.h"
#include "ncerg/random.hpp"
#include "ncerg/words.hpp"

using namespace ncerg;

TEST_CASE("alphabet order") {
  const auto a = Alphabet::group(2);
  CHECK(a.letters() == std::vector<int>{-2, -1, 1, 2});
  CHECK(a.index(1) == 2);
  CHECK(a.letter(0) == -2);
  CHECK_FALSE(a.contains(0));
  CHECK_THROWS_AS(a.index(3), DomainError);
  CHECK(Alphabet::semigroup(3).letters() == std::vector<int>{1, 2, 3});
  CHECK_FALSE(Alphabet::semigroup(3).contains(-1));
  CHECK_THROWS_AS(Alphabet::group(0), DomainError);
}

TEST_CASE("sphere sizes match enumeration") {
  for (int m = 1; m <= 3; ++m)
    for (int n = 0; n <= 4; ++n) {
      const auto a = Alphabet::group(m);
      std::uint64_t count = 0;
      std::set<std::vector<int>> seen;
      for (const auto& w : Sphere(a, n)) {
        CHECK(w.reduced());
        CHECK(w.length() == static_cast<std::size_t>(n));
        seen.insert(w.letters());
        ++count;
      }
      CHECK(seen.size() == count);
      CHECK(count == sphere_size(a, n));
    }
  // 2m (2m - 1)^(n - 1)
  CHECK(sphere_size(Alphabet::group(2), 6) == 972);
  CHECK(sphere_size(Alphabet::group(3), 3) == 150);
  CHECK(sphere_size(Alphabet::semigroup(2), 5) == 32);
  CHECK(Sphere(Alphabet::group(2), 3, false).size() == 64);
  CHECK_THROWS_AS(Sphere(Alphabet::group(2), 12).materialize(1000), ResourceError);
  CHECK_THROWS_AS(sphere_size(Alphabet::group(3), 40), ResourceError);
}

TEST_CASE("free group chain and Markov measure") {
  const auto c = free_group_chain(2);
  CHECK(c.forbids_backtracking());
  CHECK(c.p(1, -1) == 0.0);
  CHECK(c.p(1, 2) == doctest::Approx(1.0 / 3.0));
  const auto a = c.alphabet();
  for (int n = 1; n <= 5; ++n) {
    double total = 0.0;
    for (const auto& w : Sphere(a, n)) total += markov_measure(c, w);
    CHECK(total == doctest::Approx(1.0));
  }
  // uniform measure on the sphere: 1 / |S_n|
  CHECK(markov_measure(c, Word(a, {1, 2, 2})) == doctest::Approx(1.0 / 36.0));
  CHECK(markov_measure(c, Word(a, {1, -1})) == 0.0);
  CHECK_THROWS_AS(markov_measure(c, Word(a, {})), DomainError);
  CHECK_FALSE(uniform_semigroup_chain(2).forbids_backtracking());
}

TEST_CASE("chain validation") {
  const auto a = Alphabet::semigroup(2);
  RealMatrix p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(SphereChain(a, p, RealVector::Constant(2, 0.6)), DomainError);
  RealMatrix q(2, 2);
  q << 0.9, 0.1, 0.5, 0.5;
  CHECK_THROWS_AS(SphereChain(a, q, RealVector::Constant(2, 0.5)), DomainError);
  CHECK_THROWS_AS(SphereChain(a, RealMatrix::Constant(3, 3, 1.0 / 3), RealVector::Constant(3, 1.0 / 3)), StructuralError);
}

TEST_CASE("actions apply the first letter first") {
  const auto alg = TraceAlgebra::diagonal(3);
  const auto a = Alphabet::group(2);
  const auto shift = ChannelOperator::block_permutation(alg, {1, 2, 0});
  const auto flip = ChannelOperator::block_permutation(alg, {1, 0, 2});
  const auto action = Action::group(a, alg, {shift, flip});
  const auto w = Word(a, {1, 2});
  const auto x = AlgElement::diagonal(alg, {cplx(1), cplx(2), cplx(3)});
  CHECK(max_abs(word_operator(action, w)(x) - flip(shift(x))) == 0.0);
  CHECK(max_abs((action.map(-1) * action.map(1))(x) - x) < 1e-15);
  const Vector v = apply_word(action, w, to_coordinates(alg, x));
  CHECK(max_abs(from_coordinates(alg, v) - flip(shift(x))) == 0.0);
}

TEST_CASE("action validation") {
  const auto alg = TraceAlgebra::matrix(2);
  const auto a = Alphabet::group(1);
  Rng rng(1);
  const auto u = ChannelOperator::inner_automorphism(alg, random_unitary(alg, rng));
  const auto half = ChannelOperator::combination({0.5, 0.5}, {u, ChannelOperator::identity(alg)});
  CHECK_THROWS_AS(Action::group(a, alg, {half}), DomainError);
  CHECK_THROWS_AS(Action::group(a, alg, {u}, std::vector<ChannelOperator>{u}), DomainError);
  CHECK_NOTHROW(Action::group(a, alg, {u}, std::vector<ChannelOperator>{u.adjoint()}));
  CHECK_THROWS_AS(Action::semigroup(Alphabet::semigroup(1), alg, {ChannelOperator(alg, Matrix::Zero(4, 4))}), DomainError);
  CHECK_NOTHROW(Action::semigroup(Alphabet::semigroup(2), alg, {u, half}));
}

TEST_CASE("strict irreducibility probe") {
  CHECK(is_strictly_irreducible(free_group_chain(2), 4).irreducible);
  CHECK(is_strictly_irreducible(uniform_semigroup_chain(3), 1).power == 1);
  // identity chain: P P^t = I never becomes positive
  const auto a = Alphabet::semigroup(2);
  const SphereChain stuck(a, RealMatrix::Identity(2, 2), RealVector::Constant(2, 0.5));
  CHECK_FALSE(is_strictly_irreducible(stuck, 10).irreducible);
}
