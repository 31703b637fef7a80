#include "ncerg/cesaro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncerg {

ChebyshevFamily chebyshev_family(const ChannelOperator& t1, double lambda, int n_max) {
  if (!(lambda > 0.5 && lambda < 1.0)) throw DomainError("Chebyshev family needs 1/2 < lambda < 1");
  if (!t1.is_endomorphism()) throw StructuralError("T_1 must map the algebra to itself");
  if (n_max < 1) throw DomainError("family horizon must be >= 1");
  ChebyshevFamily f{t1, lambda, {ChannelOperator::identity(t1.domain()), t1}, {}, {}, {}, true};
  const Matrix& a = t1.matrix();
  for (int n = 1; n < n_max; ++n) {
    const Matrix cur = f.members[static_cast<std::size_t>(n)].matrix();
    const Matrix prev = f.members[static_cast<std::size_t>(n - 1)].matrix();
    f.members.emplace_back(t1.domain(), Matrix((a * cur - (1 - lambda) * prev) / lambda));
    const Matrix& next = f.members.back().matrix();
    f.recursion.push_back(max_abs_diff(a * cur, lambda * next + (1 - lambda) * prev));
  }
  for (const auto& t : f.members) {
    f.commutation.push_back(max_abs_diff(a * t.matrix(), t.matrix() * a));
    const auto rep = certify_markov(t, 8);
    f.markov.push_back(rep.markov);
    f.markov_preserved = f.markov_preserved && rep.markov;
  }
  return f;
}

ChannelOperator mn_operator(const ChebyshevFamily& family, int n) {
  if (n < 0) throw DomainError("M_n needs n >= 0");
  if (n > family.horizon()) throw ResourceError("M_n requested past the generated horizon");
  Matrix acc = Matrix::Zero(family.t1.matrix().rows(), family.t1.matrix().cols());
  for (int r = 0; r <= n; ++r) acc += family.members[static_cast<std::size_t>(r)].matrix();
  return ChannelOperator(family.t1.domain(), acc / static_cast<double>(n + 1));
}

AlgElement mn_average(const ChebyshevFamily& family, int n, const AlgElement& x) {
  if (n == 0) return x;
  return mn_operator(family, n)(x);
}

ChannelOperator power_average_operator(const ChannelOperator& t, int n) {
  if (n < 0) throw DomainError("power average needs n >= 0");
  if (!t.is_endomorphism()) throw StructuralError("power average needs an endomorphism");
  const auto d = t.matrix().rows();
  Matrix acc = Matrix::Identity(d, d);
  Matrix pw = Matrix::Identity(d, d);
  for (int r = 1; r <= n; ++r) {
    pw = t.matrix() * pw;
    acc += pw;
  }
  return ChannelOperator(t.domain(), acc / static_cast<double>(n + 1));
}

Domination domination_estimate(const ChebyshevFamily& family, const AlgElement& x, int n) {
  const auto& alg = family.t1.domain();
  if (!is_positive(x)) throw DomainError("domination estimate needs a positive element");
  const auto a = mn_average(family, n, x);
  const auto b = power_average_operator(family.t1, 3 * n)(x);
  const auto slack = 1e-10 * AlgElement::identity(alg);
  auto feasible = [&](double c) {
    const auto d = c * b - a + slack;
    return min_eigenvalue(0.5 * (d + d.adjoint())) >= 0.0;
  };
  if (feasible(0.0)) return {0.0, true};
  double hi = 1.0;
  while (!feasible(hi)) {
    hi *= 2.0;
    if (hi > 1e12) return {std::numeric_limits<double>::infinity(), false};
  }
  double lo = hi / 2.0;
  if (hi == 1.0) lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return {hi, true};
}

LinfPlusBounds linf_plus_bounds(const TraceAlgebra& alg, const std::vector<AlgElement>& xs, double p) {
  if (xs.empty()) throw DomainError("bounds need at least one element");
  LinfPlusBounds b;
  auto sum = AlgElement::zero(alg);
  for (const auto& x : xs) {
    if (!is_positive(x)) throw DomainError("l_inf^+ bounds need positive elements");
    b.lower = std::max(b.lower, lp_norm(alg, x, p));
    sum += x;
  }
  b.upper = lp_norm(alg, sum, p);
  if (b.lower > b.upper * (1 + 1e-12)) throw NumericError("l_inf^+ bounds out of order");
  return b;
}

ChannelOperator mean_ergodic_projection(const ChannelOperator& t) {
  if (!t.is_endomorphism()) throw StructuralError("mean ergodic projection needs an endomorphism");
  const auto d = t.matrix().rows();
  const Matrix a = t.matrix() - Matrix::Identity(d, d);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol::kKernel) ++rank;
  const Eigen::Index k = d - rank;
  if (k == 0) return ChannelOperator(t.domain(), Matrix::Zero(d, d));
  const Matrix v = svd.matrixV().rightCols(k);  // ker(T - id)
  const Matrix w = svd.matrixU().rightCols(k);  // ker((T - id)^H)
  const Matrix g = w.adjoint() * v;
  Eigen::FullPivLU<Matrix> lu(g);
  if (!lu.isInvertible()) throw NumericError("eigenvalue 1 is not semisimple");
  return ChannelOperator(t.domain(), Matrix(v * lu.solve(w.adjoint())));
}

PowerAverageReport semigroup_power_average(const ChannelOperator& t, const AlgElement& x, int n) {
  if (n < 1) throw DomainError("power average needs n >= 1");
  if (!t.is_endomorphism() || !t.is_markov()) throw HypothesisNotMet("power averages need a Markov operator");
  const auto& alg = t.domain();
  require_shape(alg, x);
  PowerAverageReport r;
  r.limit = mean_ergodic_projection(t)(x);
  r.fixed_residual = max_abs(t(r.limit) - r.limit);
  Vector v = to_coordinates(alg, x);
  Vector sum = Vector::Zero(v.size());
  for (int k = 1; k <= n; ++k) {
    sum += v;
    v = t.apply(v);
    const auto avg = from_coordinates(alg, sum / static_cast<double>(k));
    r.distance.push_back(lp_norm(alg, avg - r.limit, 2.0));
    r.fitted_c = std::max(r.fitted_c, k * r.distance.back());
    if (k == n) r.average = avg;
  }
  r.nonincreasing_from = n;
  for (int k = n - 1; k >= 1; --k) {
    const auto i = static_cast<std::size_t>(k);
    if (r.distance[i] > r.distance[i - 1] + 1e-15) break;
    r.nonincreasing_from = k;
  }
  return r;
}

std::vector<AlgElement> direct_sum_limit(const Action& action, const SphereChain& chain,
                                         const std::vector<AlgElement>& xs) {
  const auto ds = direct_sum(action.algebra(), chain);
  const auto p = mean_ergodic_projection(direct_sum_T(action, chain));
  return ds.unpack(p(ds.pack(xs)));
}

MergeReport merge_limits_check(const Action& action, const SphereChain& chain, const std::vector<AlgElement>& xhat,
                               int horizon, double p) {
  MergeReport r;
  r.probe = is_strictly_irreducible(chain, horizon);
  if (!r.probe.irreducible)
    throw HypothesisNotMet("chain fails the strict irreducibility probe within " + std::to_string(horizon) + " steps");
  const auto& alg = action.algebra();
  const auto ys = direct_sum_apply(action, chain, xhat);
  double scale = 1.0;
  for (std::size_t i = 0; i < xhat.size(); ++i) {
    r.fixed_residual = std::max(r.fixed_residual, max_abs(ys[i] - xhat[i]));
    scale = std::max(scale, max_abs(xhat[i]));
  }
  if (r.fixed_residual > tol::kClosure * scale) throw DomainError("tuple is not fixed by the direct-sum operator");

  for (std::size_t i = 0; i < xhat.size(); ++i)
    for (std::size_t j = i + 1; j < xhat.size(); ++j) {
      r.pairwise = std::max(r.pairwise, lp_norm(alg, xhat[i] - xhat[j], 2.0));
      r.norm_spread = std::max(r.norm_spread, std::abs(lp_norm(alg, xhat[i], p) - lp_norm(alg, xhat[j], p)));
    }
  for (const auto& m : action.maps()) r.invariance = std::max(r.invariance, lp_norm(alg, m(xhat[0]) - xhat[0], 2.0));
  r.merged = r.pairwise <= 1e-8 && r.invariance <= 1e-8;
  return r;
}

}  // namespace ncerg
