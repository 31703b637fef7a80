#pragma once

// Orlicz functions, generalized singular numbers and Luxemburg norms.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ncerg/algebra.hpp"

namespace ncerg {

/// Log-spaced evaluation grid. Every grid-based verdict reports its witness.
struct LogGrid {
  double lo = 1e-6;
  double hi = 1e6;
  int points = 4000;

  std::vector<double> values() const;
};

class OrliczFunction {
 public:
  using Fn = std::function<double(double)>;

  /// Validates Phi(0) = 0, monotonicity and convexity on `grid`, and growth
  /// at the right end. Throws DomainError on failure.
  OrliczFunction(std::string name, Fn phi, Fn inverse = {}, const LogGrid& grid = {});

  static OrliczFunction power(double p);
  /// t log(1 + t)
  static OrliczFunction llogl();
  /// t (log(1 + t))^s
  static OrliczFunction lloglpow(double s);
  /// e^t - 1; not Delta_2.
  static OrliczFunction exp_minus_one();
  /// "power:p", "llogl", "lloglpow:s" or "exp".
  static OrliczFunction parse(const std::string& spec);

  double operator()(double t) const { return phi_(t); }
  const std::string& name() const { return name_; }
  bool has_inverse() const { return static_cast<bool>(inverse_); }
  /// Phi^{-1}(y); bisection when no closed form was supplied.
  double inverse(double y) const;

  /// t -> Phi(t)^{1/p}
  Fn root(double p) const;

 private:
  std::string name_;
  Fn phi_;
  Fn inverse_;
};

/// Nonincreasing right-continuous step function on [0, inf): values[i] on
/// [breakpoints[i], breakpoints[i+1]) and 0 from breakpoints.back() on.
class StepFunction {
 public:
  StepFunction() : breakpoints_{0.0} {}
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  /// Builds from (value, length) pieces in any order; sorts descending and
  /// merges values closer than tol::kEigenMerge (relative).
  static StepFunction from_pieces(std::vector<std::pair<double, double>> pieces);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double support() const { return breakpoints_.back(); }

  double operator()(double t) const;
  /// int_0^t f(s) ds
  double integral(double t) const;
  /// int_0^t Phi(f(s)) ds
  double integral(double t, const std::function<double(double)>& phi) const;
  /// f(s) -> g(f(s)) for nondecreasing g with g(0) = 0.
  StepFunction compose(const std::function<double(double)>& g) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// mu_t(x): singular values of x with trace-weight multiplicities.
StepFunction s_numbers(const TraceAlgebra& alg, const AlgElement& x);

/// int_0^t mu_s(x) ds. Throws DomainError for t <= 0.
double k_functional(const TraceAlgebra& alg, const AlgElement& x, double t);

struct KDecomposition {
  AlgElement y;  // large part, phase restored
  AlgElement z;  // remainder, ||z|| <= mu_t(x)
  double value = 0.0;  // tau(|y|) + t ||z||_inf
};

/// x = y + z by soft-thresholding the singular values of x at mu_t(x).
KDecomposition k_decomposition(const TraceAlgebra& alg, const AlgElement& x, double t);

struct HlpReport {
  bool holds = false;
  double max_violation = 0.0;  // max over breakpoints of lhs - rhs
  double witness = 0.0;
};

/// int_0^t Phi(f) <= int_0^t Phi(g) at every breakpoint, given that g
/// majorizes f. Throws HypothesisNotMet when the majorization fails.
HlpReport check_hlp(const StepFunction& f, const StepFunction& g, const OrliczFunction& phi);

/// inf{lambda > 0 : tau(Phi(|x| / lambda)) <= 1}
double orlicz_norm(const TraceAlgebra& alg, const AlgElement& x, const OrliczFunction& phi);
/// Same norm of the scalar function on [0, inf).
double orlicz_norm(const StepFunction& f, const OrliczFunction& phi);

struct LemmaLeqReport {
  double norm = 0.0;
  double modular = 0.0;  // tau(Phi(x))
  bool holds = false;
};

/// tau(Phi(x)) <= ||x||_Phi for 0 <= x with ||x||_Phi <= 1. Throws
/// HypothesisNotMet when x is not positive or lies outside the unit ball.
LemmaLeqReport check_lemma_leq(const TraceAlgebra& alg, const AlgElement& x, const OrliczFunction& phi);

struct PConvexity {
  bool convex = false;
  double worst = 0.0;    // most negative normalized slope increment
  double witness = 0.0;  // grid point where it occurs
};

/// Discrete convexity of Phi^{1/p} on the grid.
PConvexity p_convexity_check(const OrliczFunction& phi, double p, const LogGrid& grid = {});

struct Delta2 {
  double constant = 0.0;
  bool unbounded = false;
  double witness = 0.0;
};

/// sup_t Phi(2t) / Phi(t) over the grid.
Delta2 delta2_constant(const OrliczFunction& phi, const LogGrid& grid = {});

struct Splitting {
  AlgElement x_delta;  // x chi_[0, delta/2](x)
  double t = 0.0;
  double slack = 0.0;  // min eigenvalue of x_delta + t Phi^{1/p}(x) - x
  bool holds = false;
};

/// x <= x_delta + t Phi^{1/p}(x). p-convexity is required on [grid.lo,
/// max(delta, 2 ||x||)], the range the inequality actually samples.
Splitting orlicz_splitting(const TraceAlgebra& alg, const AlgElement& x, double delta, const OrliczFunction& phi,
                           double p, const LogGrid& grid = {});

/// x chi_(0, n](x) for positive x.
AlgElement bounded_truncation(const TraceAlgebra& alg, const AlgElement& x, double n);

}  // namespace ncerg
