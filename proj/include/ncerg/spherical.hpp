#pragma once

// Spherical averages over a Markov measure on words, the direct-sum operator
// that computes them recursively, and the even-radius identities.

#include <optional>
#include <string>
#include <vector>

#include "ncerg/channels.hpp"
#include "ncerg/orlicz.hpp"
#include "ncerg/words.hpp"

namespace ncerg {

inline constexpr std::uint64_t kSphereGuard = 1'000'000;

/// The direct sum of |I| copies of M with trace sum_i p_i tau. Elements are
/// ordinary AlgElements of `sum`; pack/unpack move between the two views.
struct DirectSum {
  TraceAlgebra base;
  TraceAlgebra sum;
  std::size_t parts = 0;

  AlgElement pack(const std::vector<AlgElement>& components) const;
  std::vector<AlgElement> unpack(const AlgElement& x) const;
  /// (x, ..., x)
  AlgElement diagonal(const AlgElement& x) const;
};

DirectSum direct_sum(const TraceAlgebra& base, const SphereChain& chain);

/// (sum_i p_i ||x_i||_p^p)^{1/p}; p = infinity gives max_i ||x_i||.
double weighted_norm(const DirectSum& ds, const std::vector<AlgElement>& components, double p);

/// S_n x = sum_{|w| = n} mu(w) alpha_w(x) by enumeration. n = 0 returns x.
AlgElement spherical_avg_bruteforce(const Action& action, const SphereChain& chain, int n, const AlgElement& x,
                                    std::uint64_t guard = kSphereGuard);
/// S_n^{(i)} x: the words ending in `letter`. Needs n >= 1.
AlgElement partial_spherical(const Action& action, const SphereChain& chain, int n, int letter, const AlgElement& x,
                             std::uint64_t guard = kSphereGuard);

/// y_j = sum_i (p_i p_ij / p_j) alpha_j(x_i) as a channel on the direct sum.
ChannelOperator direct_sum_T(const Action& action, const SphereChain& chain);
/// One application of the same operator on components, without the matrix.
std::vector<AlgElement> direct_sum_apply(const Action& action, const SphereChain& chain,
                                         const std::vector<AlgElement>& xs);

/// T^n (x, ..., x); component j equals S_n^{(j)} x / p_j.
std::vector<AlgElement> diagonal_power(const Action& action, const SphereChain& chain, int n, const AlgElement& x);
/// S_n x = sum_j p_j T^n(x, ..., x)_j.
AlgElement spherical_avg_recursive(const Action& action, const SphereChain& chain, int n, const AlgElement& x);

/// Coordinate matrices of S_n^{(j)}, by alphabet index, from the recursion
/// S_{n+1}^{(j)} = alpha_j sum_i p_ij S_n^{(i)} with S_0^{(j)} = p_j id.
std::vector<ChannelOperator> partial_spherical_operators(const Action& action, const SphereChain& chain, int n);
ChannelOperator spherical_operator(const Action& action, const SphereChain& chain, int n);

struct CesaroAverage {
  AlgElement total;               // A_n x
  std::vector<AlgElement> parts;  // A_n^{(i)} x by alphabet index
};

/// A_n = (1/n) sum_{k<n} S_k. Needs n >= 1.
CesaroAverage cesaro_average(const Action& action, const SphereChain& chain, int n, const AlgElement& x);
ChannelOperator cesaro_operator(const Action& action, const SphereChain& chain, int n);

/// (U y)_j = alpha_j(y_{-j}) on the direct sum. Group alphabets only.
ChannelOperator involution_U(const Action& action, const SphereChain& chain);

struct InvolutionReport {
  double square_residual = 0.0;    // ||U^2 - id||
  double symmetry_residual = 0.0;  // ||U T U - T^*||
};

InvolutionReport check_involution(const Action& action, const SphereChain& chain);

struct ContractionReport {
  double p = 0.0;
  int samples = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // max ||Tx||_p / ||x||_p
  bool positivity = true;    // positive tuples stay positive
};

ContractionReport contraction_check(const Action& action, const SphereChain& chain, double p, int samples, Rng& rng);

struct RelationReport {
  std::vector<double> first;       // residual of identity (1), n = 1..N
  std::vector<double> second_minus;  // identity (2) with the U-terms subtracted
  std::vector<double> second_plus;   // identity (2) with the U-terms added
  bool first_holds = false;
  std::string second_sign;  // "-", "+" or "neither"
};

/// Both even-radius relations between T, T^* and U as coordinate matrices.
/// Throws DomainError for m = 1.
RelationReport check_relation_even(const Action& action, const SphereChain& chain, int n_max);

struct S1SquareReport {
  std::vector<double> square;     // S_1^2 S_{2n} identity, n = 1..N
  std::vector<double> recursion;  // S_1 S_n = l S_{n+1} + (1-l) S_{n-1}, n = 1..R
};

S1SquareReport check_s1sq_identity(const Action& action, const SphereChain& chain, int n_max, int recursion_max = 8);

/// max_j ||T^n(x..x)_j - S_n^{(j)} x / p_j||, the right side by enumeration.
double diagonal_identity_residual(const Action& action, const SphereChain& chain, int n, const AlgElement& x);

/// Expectation onto the joint fixed points of all alpha_g alpha_h.
ChannelOperator even_fixed_expectation(const Action& action);

struct Certificate {
  AlgElement e;
  double defect = 0.0;    // tau(1 - e)
  double residual = 0.0;  // sup_n ||e (x_n - x) e||
};

/// Spectral greedy search for a projection with tau(1 - e) <= eps that makes
/// the corner residual small. Never claims optimality.
Certificate bau_certificate(const TraceAlgebra& alg, const std::vector<AlgElement>& seq, const AlgElement& limit,
                            double eps, double target = 0.0);

struct ConvergenceRow {
  int n = 0;  // radius
  double err_inf = 0.0;
  double err_l2 = 0.0;
  std::vector<double> err_orlicz;
};

struct ConvergenceReport {
  std::vector<std::string> orlicz_names;
  std::vector<ConvergenceRow> rows;
  double target = 1e-6;
  std::optional<int> n_star;  // first radius with err_l2 <= target
  std::optional<Certificate> certificate;

  std::string to_csv() const;
  std::string summary() const;
};

/// ||S_{2n} x - E^{(2)} x|| for n = 1..N.
ConvergenceReport converge_even_spheres(const Action& action, const SphereChain& chain, const AlgElement& x, int n_max,
                                        const std::vector<OrliczFunction>& orlicz, double target = 1e-6);

/// %.17g
std::string format_double(double v);

}  // namespace ncerg
