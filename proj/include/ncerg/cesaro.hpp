#pragma once

// Operator families with T_1 T_n = l T_{n+1} + (1-l) T_{n-1}, their averages,
// power averages of a single Markov operator and merging of component limits.

#include <optional>
#include <vector>

#include "ncerg/channels.hpp"
#include "ncerg/spherical.hpp"

namespace ncerg {

struct ChebyshevFamily {
  ChannelOperator t1;
  double lambda = 0.0;
  std::vector<ChannelOperator> members;  // T_0 .. T_N
  std::vector<double> recursion;         // ||T_1 T_n - l T_{n+1} - (1-l) T_{n-1}||, n = 1..N-1
  std::vector<double> commutation;       // ||T_1 T_n - T_n T_1||, n = 0..N
  std::vector<bool> markov;              // certify_markov per member
  bool markov_preserved = true;

  int horizon() const { return static_cast<int>(members.size()) - 1; }
};

/// T_{n+1} = (T_1 T_n - (1-l) T_{n-1}) / l with T_0 = id. Needs 1/2 < l < 1.
ChebyshevFamily chebyshev_family(const ChannelOperator& t1, double lambda, int n_max);

/// M_n = (1/(n+1)) sum_{r<=n} T_r. ResourceError past the horizon.
ChannelOperator mn_operator(const ChebyshevFamily& family, int n);
AlgElement mn_average(const ChebyshevFamily& family, int n, const AlgElement& x);

/// (1/(n+1)) sum_{r<=n} T^r
ChannelOperator power_average_operator(const ChannelOperator& t, int n);

struct Domination {
  double c = 0.0;  // smallest c >= 0 with M_n x <= c P_{3n} x + 1e-10
  bool bounded = true;
};

/// Compares M_n x with the power average of T_1 of order 3n.
Domination domination_estimate(const ChebyshevFamily& family, const AlgElement& x, int n);

struct LinfPlusBounds {
  double lower = 0.0;  // max_n ||x_n||_p
  double upper = 0.0;  // ||sum_n x_n||_p
};

LinfPlusBounds linf_plus_bounds(const TraceAlgebra& alg, const std::vector<AlgElement>& xs, double p);

/// Projection onto ker(T - id) along the range of T - id.
ChannelOperator mean_ergodic_projection(const ChannelOperator& t);

struct PowerAverageReport {
  AlgElement average;           // (1/n) sum_{j<n} T^j x
  AlgElement limit;             // mean ergodic projection of x
  double fixed_residual = 0.0;  // ||T limit - limit||_inf
  std::vector<double> distance; // ||avg_k - limit||_2, k = 1..n
  double fitted_c = 0.0;        // max_k k * distance[k-1]
  int nonincreasing_from = 0;   // first k after which distance never grows
};

/// T must be Markov.
PowerAverageReport semigroup_power_average(const ChannelOperator& t, const AlgElement& x, int n);

/// Mean ergodic limit of (x_1, ..., x_k) under the direct-sum operator.
std::vector<AlgElement> direct_sum_limit(const Action& action, const SphereChain& chain,
                                         const std::vector<AlgElement>& xs);

struct MergeReport {
  IrreducibilityProbe probe;
  double fixed_residual = 0.0;  // ||T xhat - xhat|| on the direct sum
  double pairwise = 0.0;        // max ||xhat_i - xhat_j||_2
  double invariance = 0.0;      // max ||alpha_i(xhat) - xhat||_2
  double norm_spread = 0.0;     // max | ||xhat_i||_p - ||xhat_j||_p |
  bool merged = false;
};

/// HypothesisNotMet when the irreducibility probe fails within `horizon`;
/// DomainError when the tuple is not fixed by the direct-sum operator.
MergeReport merge_limits_check(const Action& action, const SphereChain& chain, const std::vector<AlgElement>& xhat,
                               int horizon, double p = 2.0);

}  // namespace ncerg
