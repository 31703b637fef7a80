#pragma once

// Seeded sample generators shared by the checks, the harness and the tests.

#include <random>

#include "ncerg/algebra.hpp"

namespace ncerg {

using Rng = std::mt19937_64;

/// Haar-distributed n x n unitary (QR of a complex Ginibre matrix with the
/// phases of R's diagonal removed).
Matrix random_unitary(int n, Rng& rng);

/// Blockwise Haar unitary in alg.
AlgElement random_unitary(const TraceAlgebra& alg, Rng& rng);

/// Complex Gaussian entries.
AlgElement random_element(const TraceAlgebra& alg, Rng& rng);

AlgElement random_self_adjoint(const TraceAlgebra& alg, Rng& rng);

/// g g^* for Gaussian g.
AlgElement random_positive(const TraceAlgebra& alg, Rng& rng);

/// 0 <= b <= 1 with Haar eigenvectors and uniform eigenvalues.
AlgElement random_effect(const TraceAlgebra& alg, Rng& rng);

}  // namespace ncerg
