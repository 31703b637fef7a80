#pragma once

// *-subalgebras and their trace-preserving conditional expectations.

#include <vector>

#include "ncerg/algebra.hpp"
#include "ncerg/channel.hpp"

namespace ncerg {

/// A unital *-subalgebra given by a basis orthonormal for <x, y> = tau(y^* x).
class Subalgebra {
 public:
  /// Validates orthonormality (1e-10), the unit, and closure under adjoint
  /// and product (1e-9 in the L2(tau) norm). Throws DomainError otherwise.
  Subalgebra(TraceAlgebra parent, std::vector<AlgElement> basis);

  /// Orthonormalizes a spanning set first.
  static Subalgebra span(const TraceAlgebra& parent, const std::vector<AlgElement>& spanning);
  static Subalgebra whole(const TraceAlgebra& parent);
  static Subalgebra scalars(const TraceAlgebra& parent);

  const TraceAlgebra& parent() const { return parent_; }
  const std::vector<AlgElement>& basis() const { return basis_; }
  std::size_t dimension() const { return basis_.size(); }

  /// Orthogonal projection of x onto the subalgebra.
  AlgElement project(const AlgElement& x) const;
  /// Residual ||x - project(x)||_2.
  double distance(const AlgElement& x) const;

 private:
  TraceAlgebra parent_;
  std::vector<AlgElement> basis_;
};

/// Joint fixed points {x : a(x) = x for every supplied a}. Every map must be a
/// certified automorphism of alg.
Subalgebra fixed_point_subalgebra(const std::vector<ChannelOperator>& maps, const TraceAlgebra& alg);

/// The tau-preserving conditional expectation onto sub.
ChannelOperator conditional_expectation(const Subalgebra& sub);

}  // namespace ncerg
