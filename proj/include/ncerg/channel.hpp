#pragma once

// Linear maps between tracial algebras, stored as coordinate matrices.

#include <memory>
#include <mutex>
#include <vector>

#include "ncerg/algebra.hpp"

namespace ncerg {

struct Factorization;

/// Certified properties of a channel. Each flag is true only when the
/// corresponding numerical test passed at tol::kFlag.
struct ChannelFlags {
  bool unital = false;
  bool trace_preserving = false;
  bool positive = false;
  bool completely_positive = false;
  bool automorphism = false;
  bool self_adjoint = false;

  double unital_residual = 0.0;
  double trace_residual = 0.0;
  double choi_min_eigenvalue = 0.0;
  double positivity_min_eigenvalue = 0.0;
  double multiplicative_residual = 0.0;
  double adjoint_residual = 0.0;
};

class ChannelOperator {
 public:
  ChannelOperator() = default;
  ChannelOperator(TraceAlgebra domain, TraceAlgebra codomain, Matrix matrix);
  ChannelOperator(const TraceAlgebra& alg, Matrix matrix) : ChannelOperator(alg, alg, std::move(matrix)) {}

  static ChannelOperator identity(const TraceAlgebra& alg);
  /// Builds the coordinate matrix by applying f to every matrix unit.
  static ChannelOperator from_map(const TraceAlgebra& domain, const TraceAlgebra& codomain,
                                  const std::function<AlgElement(const AlgElement&)>& f);
  /// x -> u x u^*.
  static ChannelOperator inner_automorphism(const TraceAlgebra& alg, const AlgElement& u);
  /// Moves block k to block perm[k]; blocks exchanged must share dim and weight.
  static ChannelOperator block_permutation(const TraceAlgebra& alg, const std::vector<int>& perm);
  /// sum_i c_i T_i.
  static ChannelOperator combination(const std::vector<double>& coeffs, const std::vector<ChannelOperator>& ops);

  const TraceAlgebra& domain() const { return domain_; }
  const TraceAlgebra& codomain() const { return codomain_; }
  const Matrix& matrix() const { return matrix_; }
  bool is_endomorphism() const { return domain_ == codomain_; }

  AlgElement operator()(const AlgElement& x) const;
  Vector apply(const Vector& coords) const { return matrix_ * coords; }

  /// Adjoint with respect to <x, y> = tau(y^* x) on domain and codomain.
  /// The adjoint of an adjoint returns the original matrix bit for bit.
  ChannelOperator adjoint() const;

  /// Flags are computed once, on first request, and shared by copies.
  const ChannelFlags& flags() const;
  bool is_unital() const { return flags().unital; }
  bool is_trace_preserving() const { return flags().trace_preserving; }
  bool is_positive() const { return flags().positive; }
  bool is_completely_positive() const { return flags().completely_positive; }
  bool is_automorphism() const { return flags().automorphism; }
  bool is_self_adjoint() const { return flags().self_adjoint; }
  /// Unital, positive and trace preserving.
  bool is_markov() const { return is_unital() && is_positive() && is_trace_preserving(); }

  /// Dilation data when the channel was built by factorized_channel.
  const Factorization* factorization() const { return factorization_.get(); }
  void attach_factorization(std::shared_ptr<const Factorization> f) { factorization_ = std::move(f); }

  /// this o other.
  friend ChannelOperator operator*(const ChannelOperator& a, const ChannelOperator& b);
  friend ChannelOperator operator+(const ChannelOperator& a, const ChannelOperator& b);
  friend ChannelOperator operator-(const ChannelOperator& a, const ChannelOperator& b);
  friend ChannelOperator operator*(double c, const ChannelOperator& a);

 private:
  struct FlagCache {
    std::once_flag once;
    ChannelFlags flags;
  };

  TraceAlgebra domain_;
  TraceAlgebra codomain_;
  Matrix matrix_;
  std::shared_ptr<FlagCache> cache_ = std::make_shared<FlagCache>();
  std::shared_ptr<const Matrix> adjoint_matrix_;
  std::shared_ptr<const Factorization> factorization_;
};

ChannelOperator power(const ChannelOperator& t, int n);

/// Largest entrywise deviation between two coordinate matrices.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Adjoint of a coordinate matrix A: V -> W when V and W carry the weighted
/// inner products sum_i w_i conj(y_i) x_i.
Matrix weighted_adjoint(const Matrix& a, const RealVector& domain_weights, const RealVector& codomain_weights);

/// Choi blocks C_{kl} = sum_{ij} E_ij (x) T(E^k_ij)_l, one per (domain block,
/// codomain block) pair; T is completely positive iff all are PSD.
struct ChoiMatrix {
  std::vector<Matrix> blocks;  // row-major over (k, l)
  double min_eigenvalue = 0.0;
};

ChoiMatrix choi_matrix(const ChannelOperator& t);

}  // namespace ncerg
