#pragma once

// Markov operators: certification, Dunford-Schwartz checks, dilations and
// the alternating (Rota) sequence.

#include <cstdint>
#include <optional>
#include <vector>

#include "ncerg/channel.hpp"
#include "ncerg/orlicz.hpp"
#include "ncerg/random.hpp"

namespace ncerg {

struct MarkovReport {
  ChannelFlags flags;
  bool markov = false;          // unital, positive, trace preserving
  double linf_ratio = 0.0;      // sampled sup ||Tx||_inf / ||x||_inf
  double l1_ratio = 0.0;        // sampled sup ||Tx||_1 / ||x||_1
  double l2_norm = 0.0;         // exact norm on L2(tau)
  bool linf_contraction = false;
  bool l1_contraction = false;
};

MarkovReport certify_markov(const ChannelOperator& t, int samples = 32, std::uint64_t seed = 0x6d61726bULL);

struct DunfordSchwartzReport {
  int samples = 0;
  int linf_violations = 0;
  int l1_violations = 0;
  int majorization_violations = 0;   // int_0^t mu(Tx) <= int_0^t mu(x)
  std::vector<int> orlicz_violations;  // one per supplied Phi
  double worst_excess = 0.0;           // largest relative excess seen
  bool holds = false;
};

DunfordSchwartzReport dunford_schwartz_check(const ChannelOperator& t, int samples,
                                             const std::vector<OrliczFunction>& orlicz, Rng& rng);

/// Dilation data: T = E_hat o Ad_u o iota through base (x) ancilla.
struct Factorization {
  TraceAlgebra base;
  TraceAlgebra ancilla;  // normalized
  AlgElement unitary;    // element of tensor(base, ancilla)
};

/// x -> x (x) 1
ChannelOperator ancilla_embedding(const TraceAlgebra& base, const TraceAlgebra& ancilla);
/// id (x) tau_ancilla; the trace-preserving expectation back onto the base.
ChannelOperator ancilla_expectation(const TraceAlgebra& base, const TraceAlgebra& ancilla);

/// Builds and certifies the channel; the factorization is attached to it.
/// Throws DomainError when the data are inconsistent or the result is not
/// Markov.
ChannelOperator factorized_channel(const Factorization& f);

struct NestedExpectations {
  ChannelOperator e;
  std::vector<ChannelOperator> e_n;  // e_n[n - 1] is E_n
};

struct RotaReport {
  std::vector<AlgElement> forward;   // T^n (T^*)^n x, n = 0..N
  std::vector<AlgElement> mirrored;  // (T^*)^n T^n x
  std::vector<double> forward_steps;   // ||A_{n+1} x - A_n x||_inf
  std::vector<double> mirrored_steps;
  std::vector<double> nested_residuals;  // ||(T^*)^n T^n x - E E_n x||_inf
  bool nested_ok = true;
};

RotaReport rota_sequence(const ChannelOperator& t, const AlgElement& x, int n_max,
                         const std::optional<NestedExpectations>& nested = std::nullopt);

/// A factorizable T on base (x) factor^{(x) k} with (T^*)^n T^n = E E_n:
/// T = E_base o shift o (trace out the last factor), where E_base projects
/// the base onto its diagonal and E_n traces out the last n factors.
/// E and E_n are built directly from their index formulas, not from T.
struct NestedRealization {
  TraceAlgebra alg;
  ChannelOperator t;
  NestedExpectations expectations;
};

NestedRealization nested_shift_realization(int base_dim, int factor_dim, int factors, int n_max);

struct KadisonReport {
  int samples = 0;
  int violations = 0;
  double worst = 0.0;  // min eigenvalue of T(x^*x) - T(x)^*T(x), normalized
};

/// T(x)^* T(x) <= T(x^* x). Throws HypothesisNotMet unless T is unital and CP.
KadisonReport kadison_check(const ChannelOperator& t, const std::vector<AlgElement>& xs);
KadisonReport kadison_check(const ChannelOperator& t, int samples, Rng& rng);

}  // namespace ncerg
