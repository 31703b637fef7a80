#include "ncerg/channels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace ncerg {

namespace {

double relative_excess(double lhs, double rhs) { return (lhs - rhs) / std::max(1.0, std::abs(rhs)); }

double l2_operator_norm(const ChannelOperator& t) {
  const RealVector sd = t.domain().coordinate_weights().cwiseSqrt();
  const RealVector sc = t.codomain().coordinate_weights().cwiseSqrt();
  const Matrix scaled = sc.cast<cplx>().asDiagonal() * t.matrix() * sd.cwiseInverse().cast<cplx>().asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(scaled);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

Matrix partial_trace_last(const Matrix& y, int keep, int traced) {
  Matrix out = Matrix::Zero(keep, keep);
  for (int a = 0; a < keep; ++a)
    for (int b = 0; b < keep; ++b)
      for (int c = 0; c < traced; ++c) out(a, b) += y(a * traced + c, b * traced + c);
  return out;
}

}  // namespace

MarkovReport certify_markov(const ChannelOperator& t, int samples, std::uint64_t seed) {
  MarkovReport r;
  r.flags = t.flags();
  r.markov = t.is_markov();
  Rng rng(seed);
  std::vector<AlgElement> xs{AlgElement::identity(t.domain())};
  for (int s = 0; s < samples; ++s)
    xs.push_back(s % 2 ? random_element(t.domain(), rng) : random_self_adjoint(t.domain(), rng));
  for (const auto& x : xs) {
    const auto tx = t(x);
    r.linf_ratio = std::max(r.linf_ratio, operator_norm(tx) / operator_norm(x));
    r.l1_ratio = std::max(r.l1_ratio, lp_norm(t.codomain(), tx, 1.0) / lp_norm(t.domain(), x, 1.0));
  }
  r.l2_norm = l2_operator_norm(t);
  r.linf_contraction = r.linf_ratio <= 1.0 + tol::kFlag;
  r.l1_contraction = r.l1_ratio <= 1.0 + tol::kFlag;
  return r;
}

DunfordSchwartzReport dunford_schwartz_check(const ChannelOperator& t, int samples,
                                             const std::vector<OrliczFunction>& orlicz, Rng& rng) {
  DunfordSchwartzReport r;
  r.samples = samples;
  r.orlicz_violations.assign(orlicz.size(), 0);
  const auto& dom = t.domain();
  const auto& cod = t.codomain();
  auto note = [&r](double excess) {
    r.worst_excess = std::max(r.worst_excess, excess);
    return excess > tol::kFlag;
  };
  for (int s = 0; s < samples; ++s) {
    const auto x = random_element(dom, rng);
    const auto tx = t(x);
    r.linf_violations += note(relative_excess(operator_norm(tx), operator_norm(x)));
    r.l1_violations += note(relative_excess(lp_norm(cod, tx, 1.0), lp_norm(dom, x, 1.0)));

    const auto f = s_numbers(cod, tx);
    const auto g = s_numbers(dom, x);
    std::vector<double> ts = f.breakpoints();
    ts.insert(ts.end(), g.breakpoints().begin(), g.breakpoints().end());
    bool bad = false;
    for (double u : ts) bad |= note(relative_excess(f.integral(u), g.integral(u)));
    r.majorization_violations += bad;

    for (std::size_t i = 0; i < orlicz.size(); ++i)
      r.orlicz_violations[i] += note(relative_excess(orlicz_norm(cod, tx, orlicz[i]), orlicz_norm(dom, x, orlicz[i])));
  }
  r.holds = r.linf_violations == 0 && r.l1_violations == 0 && r.majorization_violations == 0 &&
            std::all_of(r.orlicz_violations.begin(), r.orlicz_violations.end(), [](int v) { return v == 0; });
  return r;
}

ChannelOperator ancilla_embedding(const TraceAlgebra& base, const TraceAlgebra& ancilla) {
  const auto big = tensor(base, ancilla);
  return ChannelOperator::from_map(base, big, [&](const AlgElement& x) {
    std::vector<Matrix> blocks;
    for (std::size_t k = 0; k < base.block_count(); ++k)
      for (std::size_t l = 0; l < ancilla.block_count(); ++l) {
        const int m = ancilla.block_dim(l);
        blocks.push_back(kron(x.block(k), Matrix::Identity(m, m)));
      }
    return AlgElement(std::move(blocks));
  });
}

ChannelOperator ancilla_expectation(const TraceAlgebra& base, const TraceAlgebra& ancilla) {
  const auto big = tensor(base, ancilla);
  const std::size_t nl = ancilla.block_count();
  return ChannelOperator::from_map(big, base, [&](const AlgElement& y) {
    auto out = AlgElement::zero(base);
    for (std::size_t k = 0; k < base.block_count(); ++k)
      for (std::size_t l = 0; l < nl; ++l)
        out.block(k) += ancilla.weight(l) * partial_trace_last(y.block(k * nl + l), base.block_dim(k), ancilla.block_dim(l));
    return out;
  });
}

ChannelOperator factorized_channel(const Factorization& f) {
  if (!f.ancilla.normalized()) throw DomainError("factorization: the ancilla trace must be normalized");
  const auto big = tensor(f.base, f.ancilla);
  if (!f.unitary.matches(big)) throw DomainError("factorization: unitary does not live on base (x) ancilla");
  if (max_abs(f.unitary.adjoint() * f.unitary - AlgElement::identity(big)) > tol::kFlag)
    throw DomainError("factorization: u is not unitary");

  auto t = ancilla_expectation(f.base, f.ancilla) * ChannelOperator::inner_automorphism(big, f.unitary) *
           ancilla_embedding(f.base, f.ancilla);
  const auto& fl = t.flags();
  if (!fl.unital || !fl.trace_preserving || !fl.completely_positive)
    throw DomainError("factorization: composite is not a Markov operator");
  t.attach_factorization(std::make_shared<const Factorization>(f));
  return t;
}

RotaReport rota_sequence(const ChannelOperator& t, const AlgElement& x, int n_max,
                         const std::optional<NestedExpectations>& nested) {
  if (n_max < 1) throw DomainError("rota_sequence needs N >= 1");
  if (!t.is_endomorphism()) throw StructuralError("rota_sequence needs an endomorphism");
  const auto& alg = t.domain();
  require_shape(alg, x);
  const auto adj = t.adjoint();
  const Vector v = to_coordinates(alg, x);

  RotaReport r;
  Vector down = v;  // (T^*)^n x
  Vector up = v;    // T^n x
  for (int n = 0; n <= n_max; ++n) {
    Vector fwd = down;
    for (int i = 0; i < n; ++i) fwd = t.apply(fwd);
    Vector mir = up;
    for (int i = 0; i < n; ++i) mir = adj.apply(mir);
    r.forward.push_back(from_coordinates(alg, fwd));
    r.mirrored.push_back(from_coordinates(alg, mir));
    down = adj.apply(down);
    up = t.apply(up);
  }
  for (int n = 0; n < n_max; ++n) {
    r.forward_steps.push_back(operator_norm(r.forward[n + 1] - r.forward[n]));
    r.mirrored_steps.push_back(operator_norm(r.mirrored[n + 1] - r.mirrored[n]));
  }
  if (nested) {
    const double scale = std::max(1.0, max_abs(x));
    for (int n = 1; n <= n_max && n <= static_cast<int>(nested->e_n.size()); ++n) {
      const auto target = nested->e(nested->e_n[static_cast<std::size_t>(n - 1)](x));
      const double res = max_abs(r.mirrored[static_cast<std::size_t>(n)] - target);
      r.nested_residuals.push_back(res);
      if (res > tol::kClosure * scale) r.nested_ok = false;
    }
  }
  return r;
}

NestedRealization nested_shift_realization(int base_dim, int factor_dim, int factors, int n_max) {
  if (base_dim < 1 || factor_dim < 1 || factors < 1 || n_max < 1)
    throw DomainError("nested realization needs positive dimensions");
  int tail = 1;
  for (int i = 0; i < factors; ++i) tail *= factor_dim;
  const int dim = base_dim * tail;
  if (dim > 32) throw ResourceError("nested realization: algebra larger than M_32");

  // Build the algebra as (everything but the last factor) (x) last factor so
  // the trace-out map comes straight from the dilation primitives.
  const auto head = TraceAlgebra::matrix(dim / factor_dim);
  const auto last = TraceAlgebra::matrix(factor_dim);
  const auto alg = tensor(head, last);

  const auto trace_out_last = ancilla_embedding(head, last) * ancilla_expectation(head, last);

  // Shift of the tail factors: (i0, i1..ik) -> (i0, ik, i1..i_{k-1}).
  Matrix perm = Matrix::Zero(dim, dim);
  for (int idx = 0; idx < dim; ++idx) {
    const int i0 = idx / tail;
    int rest = idx % tail;
    const int lastdigit = rest % factor_dim;
    const int shifted = lastdigit * (tail / factor_dim) + rest / factor_dim;
    perm(i0 * tail + shifted, idx) = 1.0;
  }
  const auto shift = ChannelOperator::inner_automorphism(alg, AlgElement({perm}));

  // Diagonal expectation of the base factor as an average of phase conjugations.
  std::vector<ChannelOperator> phases;
  std::vector<double> coeffs;
  for (int j = 0; j < base_dim; ++j) {
    Matrix d = Matrix::Zero(dim, dim);
    for (int idx = 0; idx < dim; ++idx)
      d(idx, idx) = std::polar(1.0, 2.0 * std::numbers::pi * j * (idx / tail) / base_dim);
    phases.push_back(ChannelOperator::inner_automorphism(alg, AlgElement({d})));
    coeffs.push_back(1.0 / base_dim);
  }
  const auto base_diag = ChannelOperator::combination(coeffs, phases);

  NestedRealization out{alg, base_diag * shift * trace_out_last, {}};

  out.expectations.e = ChannelOperator::from_map(alg, alg, [&](const AlgElement& x) {
    Matrix m = x.block(0);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        if (a / tail != b / tail) m(a, b) = 0.0;
    return AlgElement({m});
  });
  for (int n = 1; n <= n_max; ++n) {
    int traced = 1;
    for (int i = 0; i < std::min(n, factors); ++i) traced *= factor_dim;
    out.expectations.e_n.push_back(ChannelOperator::from_map(alg, alg, [&](const AlgElement& x) {
      const Matrix kept = partial_trace_last(x.block(0), dim / traced, traced) / static_cast<double>(traced);
      return AlgElement({kron(kept, Matrix::Identity(traced, traced))});
    }));
  }
  return out;
}

KadisonReport kadison_check(const ChannelOperator& t, const std::vector<AlgElement>& xs) {
  if (!t.is_unital() || !t.is_completely_positive())
    throw HypothesisNotMet("Kadison inequality needs a unital completely positive map");
  KadisonReport r;
  r.worst = std::numeric_limits<double>::infinity();
  for (const auto& x : xs) {
    const auto tx = t(x);
    const auto d = t(x.adjoint() * x) - tx.adjoint() * tx;
    const auto h = 0.5 * (d + d.adjoint());
    const double scale = std::max(1.0, operator_norm(x) * operator_norm(x));
    const double v = min_eigenvalue(h) / scale;
    r.worst = std::min(r.worst, v);
    ++r.samples;
    if (v < -tol::kClosure) ++r.violations;
  }
  return r;
}

KadisonReport kadison_check(const ChannelOperator& t, int samples, Rng& rng) {
  std::vector<AlgElement> xs;
  for (int s = 0; s < samples; ++s) xs.push_back(random_element(t.domain(), rng));
  return kadison_check(t, xs);
}

}  // namespace ncerg
