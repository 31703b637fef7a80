#include <cmath>

#include "doctest.h"
#include "ncerg/orlicz.hpp"
#include "ncerg/random.hpp"

using namespace ncerg;

namespace {

TraceAlgebra halves() { return TraceAlgebra::diagonal(2); }

}  // namespace

TEST_CASE("Orlicz function validation and parsing") {
  CHECK(OrliczFunction::parse("power:2")(3.0) == doctest::Approx(9.0));
  CHECK(OrliczFunction::parse("llogl")(1.0) == doctest::Approx(std::log(2.0)));
  CHECK(OrliczFunction::parse("lloglpow:2")(1.0) == doctest::Approx(std::log(2.0) * std::log(2.0)));
  CHECK(OrliczFunction::parse("llogl").name() == "llogl");
  CHECK_THROWS_AS(OrliczFunction::parse("power:0.5"), DomainError);
  CHECK_THROWS_AS(OrliczFunction::parse("cosh"), DomainError);
  CHECK_THROWS_AS(OrliczFunction("sqrt", [](double t) { return std::sqrt(t); }), DomainError);
  CHECK_THROWS_AS(OrliczFunction("shifted", [](double t) { return t + 1.0; }), DomainError);
  const auto psi = OrliczFunction::llogl();
  CHECK(psi(psi.inverse(2.5)) == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("step functions") {
  const auto f = StepFunction::from_pieces({{1.0, 0.5}, {3.0, 0.25}, {0.0, 1.0}});
  CHECK(f.support() == doctest::Approx(0.75));
  CHECK(f(0.0) == 3.0);
  CHECK(f(0.25) == 1.0);  // right-continuous
  CHECK(f(0.8) == 0.0);
  CHECK(f.integral(0.5) == doctest::Approx(0.75 + 0.25));
  CHECK(f.integral(10.0) == doctest::Approx(1.25));
  CHECK(f.integral(1.0, [](double v) { return v * v; }) == doctest::Approx(9 * 0.25 + 0.5));
  const auto g = f.compose([](double v) { return 2 * v; });
  CHECK(g(0.1) == 6.0);
}

TEST_CASE("s-numbers carry trace weights") {
  const auto a = TraceAlgebra({{2, 0.25}, {1, 0.5}}, true);
  const auto x = AlgElement::diagonal(a, {cplx(-4), cplx(1), cplx(2)});
  const auto mu = s_numbers(a, x);
  CHECK(mu(0.0) == doctest::Approx(4.0));
  CHECK(mu(0.25) == doctest::Approx(2.0));
  CHECK(mu(0.75) == doctest::Approx(1.0));
  CHECK(mu.support() == doctest::Approx(1.0));
  // ||x||_1 = integral of mu
  CHECK(mu.integral(1.0) == doctest::Approx(lp_norm(a, x, 1.0)));
}

TEST_CASE("K-functional") {
  const auto a = halves();
  const auto x = AlgElement::diagonal(a, {cplx(3), cplx(1)});
  // int_0^0.75 mu = 3 * 0.5 + 1 * 0.25
  CHECK(k_functional(a, x, 0.75) == doctest::Approx(1.75));
  const auto k = k_decomposition(a, x, 0.75);
  CHECK(max_abs(k.y + k.z - x) < 1e-13);
  CHECK(k.value == doctest::Approx(1.75));
  CHECK_THROWS_AS(k_functional(a, x, 0.0), DomainError);
}

TEST_CASE("Luxemburg norm: frozen values") {
  const auto a = halves();
  const auto x = AlgElement::diagonal(a, {cplx(2), cplx(0)});
  // root of (1/2)(2/l) log(1 + 2/l) = 1, solved independently with brentq
  CHECK(orlicz_norm(a, x, OrliczFunction::llogl()) == doctest::Approx(1.0600903198932103).epsilon(1e-10));
  CHECK(orlicz_norm(a, x, OrliczFunction::lloglpow(2.0)) == doctest::Approx(1.08810245690413).epsilon(1e-10));
  // (1/2)(e^{1/l} - 1) = 1  =>  l = 1 / log 3
  const auto y = AlgElement::diagonal(a, {cplx(1), cplx(0)});
  CHECK(orlicz_norm(a, y, OrliczFunction::exp_minus_one()) == doctest::Approx(1.0 / std::log(3.0)).epsilon(1e-10));
  CHECK(orlicz_norm(a, AlgElement::zero(a), OrliczFunction::llogl()) == 0.0);
}

TEST_CASE("Luxemburg norm: both routes and power functions") {
  Rng rng(1);
  const auto a = TraceAlgebra({{2, 0.3}, {1, 0.4}}, true);
  for (double p : {1.0, 2.0, 3.5}) {
    const auto phi = OrliczFunction::power(p);
    for (int s = 0; s < 5; ++s) {
      const auto x = random_element(a, rng);
      const double via_element = orlicz_norm(a, x, phi);
      CHECK(via_element == doctest::Approx(lp_norm(a, x, p)).epsilon(1e-10));
      CHECK(orlicz_norm(s_numbers(a, x), phi) == doctest::Approx(via_element).epsilon(1e-10));
    }
  }
}

TEST_CASE("modular bound inside the unit ball") {
  Rng rng(2);
  const auto a = TraceAlgebra::matrix(3);
  const auto psi = OrliczFunction::llogl();
  for (int s = 0; s < 50; ++s) {
    auto x = random_positive(a, rng);
    x = (0.999 / orlicz_norm(a, x, psi)) * x;
    const auto r = check_lemma_leq(a, x, psi);
    CHECK(r.holds);
    CHECK(r.modular <= r.norm + 1e-12);
  }
  CHECK_THROWS_AS(check_lemma_leq(a, 5.0 * AlgElement::identity(a), psi), HypothesisNotMet);
  CHECK_THROWS_AS(check_lemma_leq(a, -0.1 * AlgElement::identity(a), psi), HypothesisNotMet);
}

TEST_CASE("Hardy-Littlewood-Polya") {
  const auto f = StepFunction::from_pieces({{1.0, 1.0}});
  const auto g = StepFunction::from_pieces({{2.0, 0.5}});
  const auto r = check_hlp(f, g, OrliczFunction::power(2.0));
  CHECK(r.holds);
  CHECK_THROWS_AS(check_hlp(g, f, OrliczFunction::power(2.0)), HypothesisNotMet);
}

TEST_CASE("p-convexity verdicts") {
  CHECK(p_convexity_check(OrliczFunction::power(2.0), 2.0).convex);
  CHECK(p_convexity_check(OrliczFunction::power(3.0), 1.5).convex);
  CHECK_FALSE(p_convexity_check(OrliczFunction::power(1.0), 2.0).convex);
  CHECK_FALSE(p_convexity_check(OrliczFunction::power(2.0), 3.0).convex);
  // t log(1+t) to the power 9/10 turns concave near t = 2626.67 (root found with brentq)
  const LogGrid small{1e-6, 2000.0, 4000};
  CHECK(p_convexity_check(OrliczFunction::llogl(), 10.0 / 9.0, small).convex);
  const auto full = p_convexity_check(OrliczFunction::llogl(), 10.0 / 9.0);
  CHECK_FALSE(full.convex);
  CHECK(full.witness > 2626.0);
}

TEST_CASE("Delta_2 constants") {
  CHECK(delta2_constant(OrliczFunction::power(3.0)).constant == doctest::Approx(8.0).epsilon(1e-6));
  const auto psi = delta2_constant(OrliczFunction::llogl());
  CHECK_FALSE(psi.unbounded);
  CHECK(psi.constant <= 4.0 + 1e-9);
  CHECK(delta2_constant(OrliczFunction::exp_minus_one()).unbounded);
}

TEST_CASE("splitting and truncation") {
  const auto a = halves();
  const auto x = AlgElement::diagonal(a, {cplx(3), cplx(0.25)});
  // Phi = t^2, p = 1: t = sup_{l >= 1/2} l / l^2 = 2
  const auto sp = orlicz_splitting(a, x, 1.0, OrliczFunction::power(2.0), 1.0);
  CHECK(sp.t == doctest::Approx(2.0));
  CHECK(sp.holds);
  CHECK(max_abs(sp.x_delta - AlgElement::diagonal(a, {cplx(0), cplx(0.25)})) < 1e-14);

  const auto b = bounded_truncation(a, x, 1.0);
  CHECK(max_abs(b - AlgElement::diagonal(a, {cplx(0), cplx(0.25)})) < 1e-14);
}
