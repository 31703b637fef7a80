#include "ncerg/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ncerg/expectation.hpp"

namespace ncerg {

namespace {

// c_ij = p_i p_ij / p_j
RealMatrix sum_coefficients(const SphereChain& chain) {
  const auto& p = chain.transition();
  const auto& pi = chain.stationary();
  RealMatrix c(p.rows(), p.cols());
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j) c(i, j) = pi(i) * p(i, j) / pi(j);
  return c;
}

void require_compatible(const Action& action, const SphereChain& chain) {
  if (!(action.alphabet() == chain.alphabet())) throw StructuralError("action and chain use different alphabets");
}

Sphere chain_sphere(const SphereChain& chain, int n) {
  const bool reduced = chain.alphabet().is_group() && chain.forbids_backtracking();
  return Sphere(chain.alphabet(), n, reduced);
}

std::vector<Vector> step(const std::vector<ChannelOperator>& maps, const RealMatrix& c, const std::vector<Vector>& v) {
  const auto parts = static_cast<Eigen::Index>(v.size());
  std::vector<Vector> out(v.size());
  for (Eigen::Index j = 0; j < parts; ++j) {
    Vector acc = Vector::Zero(v[0].size());
    for (Eigen::Index i = 0; i < parts; ++i)
      if (c(i, j) != 0.0) acc += c(i, j) * v[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(j)] = maps[static_cast<std::size_t>(j)].apply(acc);
  }
  return out;
}

// Matrices of S_k for k = 0..n via the partial-operator recursion.
std::vector<Matrix> sphere_matrices(const Action& action, const SphereChain& chain, int n) {
  const auto d = static_cast<Eigen::Index>(action.algebra().dimension());
  const auto& p = chain.transition();
  const auto& pi = chain.stationary();
  const std::size_t parts = chain.alphabet().size();
  std::vector<Matrix> partial(parts);
  for (std::size_t j = 0; j < parts; ++j) partial[j] = pi(static_cast<Eigen::Index>(j)) * Matrix::Identity(d, d);
  std::vector<Matrix> out{Matrix::Identity(d, d)};
  for (int k = 1; k <= n; ++k) {
    std::vector<Matrix> next(parts);
    Matrix total = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < parts; ++j) {
      Matrix acc = Matrix::Zero(d, d);
      for (std::size_t i = 0; i < parts; ++i) {
        const double pij = p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (pij != 0.0) acc += pij * partial[i];
      }
      next[j] = action.at(j).matrix() * acc;
      total += next[j];
    }
    partial = std::move(next);
    out.push_back(std::move(total));
  }
  return out;
}

double residual(const Matrix& a, const Matrix& b) { return max_abs_diff(a, b); }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

AlgElement DirectSum::pack(const std::vector<AlgElement>& components) const {
  if (components.size() != parts) throw StructuralError("direct sum needs one component per letter");
  std::vector<Matrix> blocks;
  for (const auto& c : components) {
    require_shape(base, c);
    blocks.insert(blocks.end(), c.blocks().begin(), c.blocks().end());
  }
  return AlgElement(std::move(blocks));
}

std::vector<AlgElement> DirectSum::unpack(const AlgElement& x) const {
  require_shape(sum, x);
  const std::size_t nb = base.block_count();
  std::vector<AlgElement> out;
  for (std::size_t i = 0; i < parts; ++i)
    out.emplace_back(std::vector<Matrix>(x.blocks().begin() + static_cast<std::ptrdiff_t>(i * nb),
                                         x.blocks().begin() + static_cast<std::ptrdiff_t>((i + 1) * nb)));
  return out;
}

AlgElement DirectSum::diagonal(const AlgElement& x) const { return pack(std::vector<AlgElement>(parts, x)); }

DirectSum direct_sum(const TraceAlgebra& base, const SphereChain& chain) {
  std::vector<Block> blocks;
  for (Eigen::Index i = 0; i < chain.stationary().size(); ++i)
    for (const auto& b : base.blocks()) blocks.push_back({b.dim, b.weight * chain.stationary()(i)});
  return {base, TraceAlgebra(std::move(blocks), base.normalized()), chain.alphabet().size()};
}

double weighted_norm(const DirectSum& ds, const std::vector<AlgElement>& components, double p) {
  return lp_norm(ds.sum, ds.pack(components), p);
}

AlgElement spherical_avg_bruteforce(const Action& action, const SphereChain& chain, int n, const AlgElement& x,
                                    std::uint64_t guard) {
  require_compatible(action, chain);
  const auto& alg = action.algebra();
  require_shape(alg, x);
  if (n < 0) throw DomainError("sphere radius must be >= 0");
  if (n == 0) return x;
  const auto sphere = chain_sphere(chain, n);
  if (sphere.size() > guard)
    throw ResourceError("brute-force sphere of radius " + std::to_string(n) + " exceeds the guard");
  const Vector v = to_coordinates(alg, x);
  Vector acc = Vector::Zero(v.size());
  for (const auto& w : sphere) {
    const double mu = markov_measure(chain, w);
    if (mu != 0.0) acc += mu * apply_word(action, w, v);
  }
  return from_coordinates(alg, acc);
}

AlgElement partial_spherical(const Action& action, const SphereChain& chain, int n, int letter, const AlgElement& x,
                             std::uint64_t guard) {
  require_compatible(action, chain);
  const auto& alg = action.algebra();
  require_shape(alg, x);
  if (n < 1) throw DomainError("partial spherical average needs n >= 1");
  if (!chain.alphabet().contains(letter)) throw DomainError("letter outside the alphabet");
  const auto sphere = chain_sphere(chain, n);
  if (sphere.size() > guard)
    throw ResourceError("brute-force sphere of radius " + std::to_string(n) + " exceeds the guard");
  const Vector v = to_coordinates(alg, x);
  Vector acc = Vector::Zero(v.size());
  for (const auto& w : sphere) {
    if (w.letters().back() != letter) continue;
    const double mu = markov_measure(chain, w);
    if (mu != 0.0) acc += mu * apply_word(action, w, v);
  }
  return from_coordinates(alg, acc);
}

ChannelOperator direct_sum_T(const Action& action, const SphereChain& chain) {
  require_compatible(action, chain);
  const auto ds = direct_sum(action.algebra(), chain);
  const auto d = static_cast<Eigen::Index>(action.algebra().dimension());
  const auto parts = static_cast<Eigen::Index>(ds.parts);
  const RealMatrix c = sum_coefficients(chain);
  Matrix t = Matrix::Zero(parts * d, parts * d);
  for (Eigen::Index j = 0; j < parts; ++j)
    for (Eigen::Index i = 0; i < parts; ++i)
      if (c(i, j) != 0.0) t.block(j * d, i * d, d, d) = c(i, j) * action.at(static_cast<std::size_t>(j)).matrix();
  return ChannelOperator(ds.sum, std::move(t));
}

std::vector<AlgElement> direct_sum_apply(const Action& action, const SphereChain& chain,
                                         const std::vector<AlgElement>& xs) {
  require_compatible(action, chain);
  if (xs.size() != chain.alphabet().size()) throw StructuralError("direct sum needs one component per letter");
  const auto& alg = action.algebra();
  std::vector<Vector> v;
  for (const auto& x : xs) v.push_back(to_coordinates(alg, x));
  std::vector<AlgElement> out;
  for (const auto& y : step(action.maps(), sum_coefficients(chain), v)) out.push_back(from_coordinates(alg, y));
  return out;
}

std::vector<AlgElement> diagonal_power(const Action& action, const SphereChain& chain, int n, const AlgElement& x) {
  require_compatible(action, chain);
  if (n < 0) throw DomainError("power must be >= 0");
  const auto& alg = action.algebra();
  const RealMatrix c = sum_coefficients(chain);
  std::vector<Vector> v(chain.alphabet().size(), to_coordinates(alg, x));
  for (int k = 0; k < n; ++k) v = step(action.maps(), c, v);
  std::vector<AlgElement> out;
  for (const auto& y : v) out.push_back(from_coordinates(alg, y));
  return out;
}

AlgElement spherical_avg_recursive(const Action& action, const SphereChain& chain, int n, const AlgElement& x) {
  const auto parts = diagonal_power(action, chain, n, x);
  auto out = AlgElement::zero(action.algebra());
  for (std::size_t j = 0; j < parts.size(); ++j) out += chain.stationary()(static_cast<Eigen::Index>(j)) * parts[j];
  return out;
}

std::vector<ChannelOperator> partial_spherical_operators(const Action& action, const SphereChain& chain, int n) {
  require_compatible(action, chain);
  if (n < 0) throw DomainError("radius must be >= 0");
  const auto& alg = action.algebra();
  const auto d = static_cast<Eigen::Index>(alg.dimension());
  const auto& p = chain.transition();
  const std::size_t parts = chain.alphabet().size();
  std::vector<Matrix> partial(parts);
  for (std::size_t j = 0; j < parts; ++j)
    partial[j] = chain.stationary()(static_cast<Eigen::Index>(j)) * Matrix::Identity(d, d);
  for (int k = 0; k < n; ++k) {
    std::vector<Matrix> next(parts);
    for (std::size_t j = 0; j < parts; ++j) {
      Matrix acc = Matrix::Zero(d, d);
      for (std::size_t i = 0; i < parts; ++i) {
        const double pij = p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (pij != 0.0) acc += pij * partial[i];
      }
      next[j] = action.at(j).matrix() * acc;
    }
    partial = std::move(next);
  }
  std::vector<ChannelOperator> out;
  for (auto& m : partial) out.emplace_back(alg, std::move(m));
  return out;
}

ChannelOperator spherical_operator(const Action& action, const SphereChain& chain, int n) {
  require_compatible(action, chain);
  if (n < 0) throw DomainError("radius must be >= 0");
  return ChannelOperator(action.algebra(), sphere_matrices(action, chain, n).back());
}

CesaroAverage cesaro_average(const Action& action, const SphereChain& chain, int n, const AlgElement& x) {
  require_compatible(action, chain);
  if (n < 1) throw DomainError("Cesaro average needs n >= 1");
  const auto& alg = action.algebra();
  require_shape(alg, x);
  const RealMatrix c = sum_coefficients(chain);
  const auto& pi = chain.stationary();
  const std::size_t parts = chain.alphabet().size();
  std::vector<Vector> v(parts, to_coordinates(alg, x));
  std::vector<Vector> acc(parts, Vector::Zero(v[0].size()));
  for (int k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < parts; ++j) acc[j] += pi(static_cast<Eigen::Index>(j)) * v[j];
    if (k + 1 < n) v = step(action.maps(), c, v);
  }
  CesaroAverage out{AlgElement::zero(alg), {}};
  for (auto& a : acc) {
    out.parts.push_back(from_coordinates(alg, a / static_cast<double>(n)));
    out.total += out.parts.back();
  }
  return out;
}

ChannelOperator cesaro_operator(const Action& action, const SphereChain& chain, int n) {
  require_compatible(action, chain);
  if (n < 1) throw DomainError("Cesaro average needs n >= 1");
  const auto ops = sphere_matrices(action, chain, n - 1);
  Matrix acc = Matrix::Zero(ops[0].rows(), ops[0].cols());
  for (const auto& m : ops) acc += m;
  return ChannelOperator(action.algebra(), acc / static_cast<double>(n));
}

ChannelOperator involution_U(const Action& action, const SphereChain& chain) {
  require_compatible(action, chain);
  const auto& a = chain.alphabet();
  if (!a.is_group()) throw DomainError("the involution U needs a group alphabet");
  const auto ds = direct_sum(action.algebra(), chain);
  const auto d = static_cast<Eigen::Index>(action.algebra().dimension());
  const auto parts = static_cast<Eigen::Index>(ds.parts);
  Matrix u = Matrix::Zero(parts * d, parts * d);
  for (Eigen::Index j = 0; j < parts; ++j) {
    const auto src = static_cast<Eigen::Index>(a.index(-a.letter(static_cast<std::size_t>(j))));
    u.block(j * d, src * d, d, d) = action.at(static_cast<std::size_t>(j)).matrix();
  }
  return ChannelOperator(ds.sum, std::move(u));
}

InvolutionReport check_involution(const Action& action, const SphereChain& chain) {
  const auto u = involution_U(action, chain);
  const auto t = direct_sum_T(action, chain);
  const auto n = u.matrix().rows();
  InvolutionReport r;
  r.square_residual = residual(u.matrix() * u.matrix(), Matrix::Identity(n, n));
  r.symmetry_residual = residual(u.matrix() * t.matrix() * u.matrix(), t.adjoint().matrix());
  return r;
}

ContractionReport contraction_check(const Action& action, const SphereChain& chain, double p, int samples, Rng& rng) {
  require_compatible(action, chain);
  const auto ds = direct_sum(action.algebra(), chain);
  ContractionReport r;
  r.p = p;
  for (int s = 0; s < samples; ++s) {
    const bool positive = s % 5 == 0;
    std::vector<AlgElement> xs;
    for (std::size_t i = 0; i < ds.parts; ++i)
      xs.push_back(positive ? random_positive(ds.base, rng) : random_element(ds.base, rng));
    const auto ys = direct_sum_apply(action, chain, xs);
    const double nx = weighted_norm(ds, xs, p);
    const double ny = weighted_norm(ds, ys, p);
    r.worst_ratio = std::max(r.worst_ratio, ny / nx);
    if (ny > nx + tol::kFlag) ++r.violations;
    if (positive)
      for (const auto& y : ys)
        if (!is_positive(y, tol::kFlag * std::max(1.0, max_abs(y)))) r.positivity = false;
    ++r.samples;
  }
  return r;
}

RelationReport check_relation_even(const Action& action, const SphereChain& chain, int n_max) {
  require_compatible(action, chain);
  const auto& a = chain.alphabet();
  if (!a.is_group()) throw DomainError("even-radius relations need a group alphabet");
  if (a.m() < 2) throw DomainError("even-radius relations need m >= 2: their coefficients divide by 2m - 2");
  if (n_max < 1) throw DomainError("N must be >= 1");
  const double m = a.m();
  const auto t = direct_sum_T(action, chain);
  const Matrix& tm = t.matrix();
  const Matrix ts = t.adjoint().matrix();
  const Matrix u = involution_U(action, chain).matrix();
  const auto dim = tm.rows();

  std::vector<Matrix> pw{Matrix::Identity(dim, dim)};  // T^k
  for (int k = 1; k <= 2 * n_max - 1; ++k) pw.push_back(tm * pw.back());
  std::vector<Matrix> q{Matrix::Identity(dim, dim)};  // (T^*)^n T^n
  for (int n = 1; n <= n_max; ++n) q.push_back(ts * q.back() * tm);

  const double a1 = (2 * m - 2) / (2 * m - 1), b1 = 1 / (2 * m - 1);
  const double a2 = (2 * m - 1) / (2 * m - 2), b2 = 1 / (2 * m - 2);
  RelationReport r;
  for (int n = 1; n <= n_max; ++n) {
    const auto nn = static_cast<std::size_t>(n);
    const Matrix& odd = pw[2 * nn - 1];
    r.first.push_back(residual(q[nn], a1 * u * odd + b1 * q[nn - 1]));
    r.second_minus.push_back(residual(odd, a2 * u * q[nn] - b2 * u * q[nn - 1]));
    r.second_plus.push_back(residual(odd, a2 * u * q[nn] + b2 * u * q[nn - 1]));
  }
  auto worst = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
  r.first_holds = worst(r.first) <= tol::kClosure;
  const bool minus = worst(r.second_minus) <= tol::kClosure;
  const bool plus = worst(r.second_plus) <= tol::kClosure;
  r.second_sign = minus && plus ? "both" : minus ? "-" : plus ? "+" : "neither";
  return r;
}

S1SquareReport check_s1sq_identity(const Action& action, const SphereChain& chain, int n_max, int recursion_max) {
  require_compatible(action, chain);
  const auto& a = chain.alphabet();
  if (!a.is_group()) throw DomainError("the S_1 identities are stated for group alphabets");
  if (n_max < 1 || recursion_max < 1) throw DomainError("N must be >= 1");
  const double m = a.m();
  const double lambda = (2 * m - 1) / (2 * m);
  const auto s = sphere_matrices(action, chain, std::max(2 * n_max + 2, recursion_max + 1));
  S1SquareReport r;
  const double c2 = lambda * lambda, c0 = (2 * m - 1) / (2 * m * m), cm = 1 / (4 * m * m);
  for (int n = 1; n <= n_max; ++n) {
    const auto k = static_cast<std::size_t>(2 * n);
    r.square.push_back(residual(s[1] * s[1] * s[k], c2 * s[k + 2] + c0 * s[k] + cm * s[k - 2]));
  }
  for (int n = 1; n <= recursion_max; ++n) {
    const auto k = static_cast<std::size_t>(n);
    r.recursion.push_back(residual(s[1] * s[k], lambda * s[k + 1] + (1 - lambda) * s[k - 1]));
  }
  return r;
}

double diagonal_identity_residual(const Action& action, const SphereChain& chain, int n, const AlgElement& x) {
  const auto comps = diagonal_power(action, chain, n, x);
  double worst = 0.0;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const int letter = chain.alphabet().letter(j);
    const double pj = chain.stationary()(static_cast<Eigen::Index>(j));
    const auto ref = n == 0 ? x : (1.0 / pj) * partial_spherical(action, chain, n, letter, x);
    worst = std::max(worst, max_abs(comps[j] - ref));
  }
  return worst;
}

ChannelOperator even_fixed_expectation(const Action& action) {
  const auto& a = action.alphabet();
  if (!a.is_group()) throw DomainError("the even subgroup needs a group action");
  std::vector<ChannelOperator> pairs;
  for (int g : a.letters())
    for (int h : a.letters()) {
      if (!action.map(g).is_automorphism() || !action.map(h).is_automorphism())
        throw DomainError("even_fixed_expectation needs an automorphism action");
      pairs.push_back(action.map(g) * action.map(h));
    }
  auto e = conditional_expectation(fixed_point_subalgebra(pairs, action.algebra()));
  for (const auto& p : pairs)
    if (max_abs_diff((e * p).matrix(), e.matrix()) > tol::kClosure)
      throw NumericError("E2 is not invariant under a generator pair");
  if (!e.is_trace_preserving()) throw NumericError("E2 is not trace preserving");
  return e;
}

Certificate bau_certificate(const TraceAlgebra& alg, const std::vector<AlgElement>& seq, const AlgElement& limit,
                            double eps, double target) {
  if (eps < 0.0) throw DomainError("certificate needs eps >= 0");
  std::vector<AlgElement> rs;
  double sup = 0.0;
  for (const auto& x : seq) {
    rs.push_back(x - limit);
    sup = std::max(sup, operator_norm(rs.back()));
  }
  const auto one = AlgElement::identity(alg);
  Certificate best{one, 0.0, sup};
  if (sup <= target || rs.empty()) return best;

  auto h = AlgElement::zero(alg);
  double w = 0.5;
  for (const auto& r : rs) {
    h += w * (r.adjoint() * r + r * r.adjoint());
    w *= 0.5;
  }
  h = 0.5 * (h + h.adjoint());
  auto spec = spectral_decomposition(alg, h);
  std::reverse(spec.begin(), spec.end());
  auto removed = AlgElement::zero(alg);
  for (const auto& sp : spec) {
    removed += sp.projection;
    const double defect = trace(alg, removed).real();
    if (defect > eps + 1e-12) break;
    const auto e = one - removed;
    double res = 0.0;
    for (const auto& r : rs) res = std::max(res, operator_norm(e * r * e));
    if (res < best.residual) best = {e, defect, res};
  }
  return best;
}

ConvergenceReport converge_even_spheres(const Action& action, const SphereChain& chain, const AlgElement& x, int n_max,
                                        const std::vector<OrliczFunction>& orlicz, double target) {
  require_compatible(action, chain);
  if (n_max < 1) throw DomainError("N must be >= 1");
  const auto& alg = action.algebra();
  const auto e2 = even_fixed_expectation(action);
  const auto limit = e2(x);

  ConvergenceReport rep;
  rep.target = target;
  for (const auto& f : orlicz) rep.orlicz_names.push_back(f.name());

  const RealMatrix c = sum_coefficients(chain);
  const auto& pi = chain.stationary();
  std::vector<Vector> v(chain.alphabet().size(), to_coordinates(alg, x));
  std::vector<AlgElement> seq;
  for (int k = 1; k <= 2 * n_max; ++k) {
    v = step(action.maps(), c, v);
    if (k % 2) continue;
    Vector s = Vector::Zero(v[0].size());
    for (std::size_t j = 0; j < v.size(); ++j) s += pi(static_cast<Eigen::Index>(j)) * v[j];
    const auto sx = from_coordinates(alg, s);
    const auto diff = sx - limit;
    ConvergenceRow row;
    row.n = k;
    row.err_inf = operator_norm(diff);
    row.err_l2 = lp_norm(alg, diff, 2.0);
    for (const auto& f : orlicz) row.err_orlicz.push_back(orlicz_norm(alg, diff, f));
    if (!rep.n_star && row.err_l2 <= target) rep.n_star = k;
    if (rep.n_star) seq.push_back(sx);
    rep.rows.push_back(std::move(row));
  }
  if (rep.n_star) rep.certificate = bau_certificate(alg, seq, limit, 0.0);
  return rep;
}

std::string ConvergenceReport::to_csv() const {
  std::ostringstream os;
  os << "n,err_inf,err_l2";
  for (const auto& name : orlicz_names) os << ",err_" << name;
  os << '\n';
  for (const auto& r : rows) {
    os << r.n << ',' << format_double(r.err_inf) << ',' << format_double(r.err_l2);
    for (double v : r.err_orlicz) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

std::string ConvergenceReport::summary() const {
  std::ostringstream os;
  os << "radii: " << rows.size() << " (even, up to " << (rows.empty() ? 0 : rows.back().n) << ")\n";
  os << "target err_l2: " << format_double(target) << '\n';
  if (n_star)
    os << "n_star: " << *n_star << '\n';
  else
    os << "n_star: not reached\n";
  if (!rows.empty()) os << "final err_l2: " << format_double(rows.back().err_l2) << '\n';
  if (certificate)
    os << "certificate: tau(1-e) = " << format_double(certificate->defect)
       << ", tail sup ||e(x_n - x)e|| = " << format_double(certificate->residual) << '\n';
  return os.str();
}

}  // namespace ncerg
