#include "ncerg/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ncerg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNormRelTol = 1e-12;
constexpr int kBisectionCap = 200;

std::string fmt_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Slopes of f on consecutive points, normalized increments, worst one.
PConvexity discrete_convexity(const std::vector<double>& ts, const std::function<double(double)>& f, double tol) {
  PConvexity out;
  out.convex = true;
  out.worst = kInf;
  double prev_slope = std::numeric_limits<double>::quiet_NaN();
  double prev_t = ts.front();
  double prev_f = f(prev_t);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double t = ts[i];
    const double ft = f(t);
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(ft) && std::isfinite(prev_f)) slope = (ft - prev_f) / (t - prev_t);
    if (std::isfinite(slope) && std::isfinite(prev_slope)) {
      const double inc = (slope - prev_slope) / std::max({1.0, std::abs(slope), std::abs(prev_slope)});
      if (inc < out.worst) {
        out.worst = inc;
        out.witness = prev_t;
      }
    }
    prev_slope = slope;
    prev_t = t;
    prev_f = ft;
  }
  if (!std::isfinite(out.worst)) out.worst = 0.0;
  out.convex = out.worst >= -tol;
  return out;
}

// Luxemburg norm of the weighted sample (a_i, w_i): inf{l : sum w_i Phi(a_i/l) <= 1}.
double luxemburg(const std::vector<double>& a, const std::vector<double>& w, const OrliczFunction& phi) {
  double amax = 0.0;
  for (double v : a) amax = std::max(amax, v);
  if (amax == 0.0) return 0.0;

  auto modular = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) continue;
      const double v = phi(a[i] / lambda);
      if (std::isnan(v)) throw NumericError("Orlicz function returned NaN at " + fmt_param(a[i] / lambda));
      s += w[i] * v;
    }
    return s;
  };
  auto feasible = [&](double lambda) { return modular(lambda) <= 1.0; };

  double hi = amax;
  int guard = 0;
  while (!feasible(hi)) {
    hi *= 2.0;
    if (++guard > 1100 || !std::isfinite(hi)) throw NumericError("Orlicz norm: no feasible upper bracket");
  }
  double lo = hi;
  guard = 0;
  while (feasible(lo)) {
    lo *= 0.5;
    if (++guard > 1100 || lo == 0.0) throw NumericError("Orlicz norm: no infeasible lower bracket");
  }
  for (int it = 0; it < kBisectionCap && hi - lo > kNormRelTol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace

std::vector<double> LogGrid::values() const {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw DomainError("log grid needs 0 < lo < hi and at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log(lo);
  const double h = (std::log(hi) - a) / (points - 1);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + h * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

OrliczFunction::OrliczFunction(std::string name, Fn phi, Fn inverse, const LogGrid& grid)
    : name_(std::move(name)), phi_(std::move(phi)), inverse_(std::move(inverse)) {
  if (!phi_) throw DomainError("Orlicz function '" + name_ + "' has no evaluator");
  if (phi_(0.0) != 0.0) throw DomainError("Orlicz function '" + name_ + "': Phi(0) != 0");

  std::vector<double> ts{0.0};
  const auto g = grid.values();
  ts.insert(ts.end(), g.begin(), g.end());
  double prev = 0.0;
  for (double t : ts) {
    const double v = phi_(t);
    if (std::isnan(v) || v < 0.0) throw DomainError("Orlicz function '" + name_ + "' is negative or NaN at " + fmt_param(t));
    if (v < prev - 1e-12 * std::abs(prev))
      throw DomainError("Orlicz function '" + name_ + "' decreases at " + fmt_param(t));
    prev = v;
  }
  const auto conv = discrete_convexity(ts, phi_, 1e-12);
  if (!conv.convex) throw DomainError("Orlicz function '" + name_ + "' is not convex near " + fmt_param(conv.witness));
  const double end = phi_(g.back());
  if (!std::isinf(end) && (!(end > phi_(g[g.size() - 2])) || !(end > phi_(g.front()))))
    throw DomainError("Orlicz function '" + name_ + "' does not grow at the grid end");
}

OrliczFunction OrliczFunction::power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("power Orlicz function needs p >= 1");
  return OrliczFunction(
      "power:" + fmt_param(p), [p](double t) { return t <= 0.0 ? 0.0 : std::pow(t, p); },
      [p](double y) { return y <= 0.0 ? 0.0 : std::pow(y, 1.0 / p); });
}

OrliczFunction OrliczFunction::llogl() {
  return OrliczFunction("llogl", [](double t) { return t <= 0.0 ? 0.0 : t * std::log1p(t); });
}

OrliczFunction OrliczFunction::lloglpow(double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("lloglpow needs s >= 0");
  return OrliczFunction("lloglpow:" + fmt_param(s),
                        [s](double t) { return t <= 0.0 ? 0.0 : t * std::pow(std::log1p(t), s); });
}

OrliczFunction OrliczFunction::exp_minus_one() {
  return OrliczFunction(
      "exp", [](double t) { return t <= 0.0 ? 0.0 : std::expm1(t); },
      [](double y) { return y <= 0.0 ? 0.0 : std::log1p(y); });
}

OrliczFunction OrliczFunction::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  auto param = [&]() {
    if (colon == std::string::npos) throw DomainError("Orlicz function '" + spec + "' needs a parameter");
    const std::string tail = spec.substr(colon + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tail.size()) throw DomainError("bad parameter in Orlicz function '" + spec + "'");
    return v;
  };
  if (head == "power") return power(param());
  if (head == "lloglpow") return lloglpow(param());
  if (colon == std::string::npos && head == "llogl") return llogl();
  if (colon == std::string::npos && head == "exp") return exp_minus_one();
  throw DomainError("unknown Orlicz function '" + spec + "'");
}

double OrliczFunction::inverse(double y) const {
  if (y <= 0.0) return 0.0;
  if (inverse_) return inverse_(y);
  double hi = 1.0;
  for (int i = 0; phi_(hi) < y; ++i) {
    hi *= 2.0;
    if (i > 1100) throw NumericError("Orlicz inverse: value out of range");
  }
  double lo = 0.0;
  for (int it = 0; it < kBisectionCap && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi_(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

OrliczFunction::Fn OrliczFunction::root(double p) const {
  if (!(p > 0.0)) throw DomainError("root needs p > 0");
  return [phi = phi_, p](double t) { return std::pow(phi(t), 1.0 / p); };
}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() != values_.size() + 1) throw StructuralError("step function needs one more breakpoint than values");
  if (breakpoints_.front() != 0.0) throw DomainError("step function must start at 0");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(breakpoints_[i + 1] > breakpoints_[i])) throw DomainError("step function breakpoints must increase");
    if (values_[i] < 0.0) throw DomainError("step function values must be nonnegative");
    if (i > 0 && values_[i] > values_[i - 1]) throw DomainError("step function values must not increase");
  }
}

StepFunction StepFunction::from_pieces(std::vector<std::pair<double, double>> pieces) {
  std::erase_if(pieces, [](const auto& p) { return !(p.second > 0.0) || !(p.first > 0.0); });
  std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::pair<double, double>> merged;
  for (const auto& [v, len] : pieces) {
    if (!merged.empty() && std::abs(merged.back().first - v) <= tol::kEigenMerge * std::max(1.0, v)) {
      auto& [mv, ml] = merged.back();
      mv = (mv * ml + v * len) / (ml + len);
      ml += len;
    } else {
      merged.emplace_back(v, len);
    }
  }
  std::vector<double> bps{0.0};
  std::vector<double> vals;
  for (const auto& [v, len] : merged) {
    vals.push_back(v);
    bps.push_back(bps.back() + len);
  }
  // Weighted means of a merged run can break monotonicity by an ulp.
  for (std::size_t i = 1; i < vals.size(); ++i) vals[i] = std::min(vals[i], vals[i - 1]);
  return StepFunction(std::move(bps), std::move(vals));
}

double StepFunction::operator()(double t) const {
  if (t < 0.0) throw DomainError("step function evaluated at negative time");
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const auto i = static_cast<std::size_t>(it - breakpoints_.begin());
  return i >= breakpoints_.size() ? 0.0 : values_[i - 1];
}

double StepFunction::integral(double t) const {
  return integral(t, [](double v) { return v; });
}

double StepFunction::integral(double t, const std::function<double(double)>& phi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double len = std::min(breakpoints_[i + 1], t) - breakpoints_[i];
    if (len <= 0.0) break;
    s += len * phi(values_[i]);
  }
  return s;
}

StepFunction StepFunction::compose(const std::function<double(double)>& g) const {
  std::vector<double> vals;
  vals.reserve(values_.size());
  for (double v : values_) vals.push_back(g(v));
  return StepFunction(breakpoints_, std::move(vals));
}

StepFunction s_numbers(const TraceAlgebra& alg, const AlgElement& x) {
  require_shape(alg, x);
  std::vector<std::pair<double, double>> pieces;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    Eigen::JacobiSVD<Matrix> svd(x.block(k));
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      pieces.emplace_back(svd.singularValues()(i), alg.weight(k));
  }
  return StepFunction::from_pieces(std::move(pieces));
}

double k_functional(const TraceAlgebra& alg, const AlgElement& x, double t) {
  if (!(t > 0.0)) throw DomainError("K-functional needs t > 0");
  return s_numbers(alg, x).integral(t);
}

KDecomposition k_decomposition(const TraceAlgebra& alg, const AlgElement& x, double t) {
  if (!(t > 0.0)) throw DomainError("K-functional needs t > 0");
  const double level = s_numbers(alg, x)(t);
  KDecomposition out{AlgElement::zero(alg), AlgElement::zero(alg), 0.0};
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    Eigen::JacobiSVD<Matrix> svd(x.block(k), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector s = svd.singularValues();
    const RealVector big = (s.array() - level).max(0.0).matrix();
    const RealVector small = s.array().min(level).matrix();
    out.y.block(k) = svd.matrixU() * big.cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
    out.z.block(k) = svd.matrixU() * small.cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
  }
  out.value = lp_norm(alg, out.y, 1.0) + t * operator_norm(out.z);
  return out;
}

HlpReport check_hlp(const StepFunction& f, const StepFunction& g, const OrliczFunction& phi) {
  std::vector<double> ts = f.breakpoints();
  ts.insert(ts.end(), g.breakpoints().begin(), g.breakpoints().end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  for (double t : ts) {
    const double rhs = g.integral(t);
    if (f.integral(t) > rhs + 1e-10 * std::max(1.0, std::abs(rhs)))
      throw HypothesisNotMet("majorization fails at t = " + fmt_param(t));
  }
  HlpReport out;
  out.max_violation = -kInf;
  out.holds = true;
  auto ph = [&phi](double v) { return phi(v); };
  for (double t : ts) {
    const double lhs = f.integral(t, ph);
    const double rhs = g.integral(t, ph);
    const double v = lhs - rhs;
    if (v > out.max_violation) {
      out.max_violation = v;
      out.witness = t;
    }
    if (v > 1e-10 * std::max(1.0, std::abs(rhs))) out.holds = false;
  }
  return out;
}

double orlicz_norm(const TraceAlgebra& alg, const AlgElement& x, const OrliczFunction& phi) {
  require_shape(alg, x);
  // Spectrum of |x| from the eigenvalues of x^* x; independent of the SVD
  // used by s_numbers.
  std::vector<double> a, w;
  for (std::size_t k = 0; k < alg.block_count(); ++k) {
    const Matrix h = x.block(k).adjoint() * x.block(k);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      a.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
      w.push_back(alg.weight(k));
    }
  }
  return luxemburg(a, w, phi);
}

double orlicz_norm(const StepFunction& f, const OrliczFunction& phi) {
  std::vector<double> a, w;
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    a.push_back(f.values()[i]);
    w.push_back(f.breakpoints()[i + 1] - f.breakpoints()[i]);
  }
  return luxemburg(a, w, phi);
}

LemmaLeqReport check_lemma_leq(const TraceAlgebra& alg, const AlgElement& x, const OrliczFunction& phi) {
  if (!is_positive(x)) throw HypothesisNotMet("lemma needs a positive element");
  LemmaLeqReport out;
  out.norm = orlicz_norm(alg, x, phi);
  if (out.norm > 1.0 + 1e-12) throw HypothesisNotMet("lemma needs ||x||_Phi <= 1, got " + fmt_param(out.norm));
  out.modular = trace(alg, functional_calculus(alg, x, [&phi](double t) { return phi(std::max(0.0, t)); })).real();
  out.holds = out.modular <= out.norm + 1e-10;
  return out;
}

PConvexity p_convexity_check(const OrliczFunction& phi, double p, const LogGrid& grid) {
  if (!(p > 0.0)) throw DomainError("p-convexity needs p > 0");
  std::vector<double> ts{0.0};
  const auto g = grid.values();
  ts.insert(ts.end(), g.begin(), g.end());
  return discrete_convexity(ts, phi.root(p), 1e-10);
}

Delta2 delta2_constant(const OrliczFunction& phi, const LogGrid& grid) {
  Delta2 out;
  const auto ts = grid.values();
  std::vector<double> ratios;
  for (double t : ts) {
    const double base = phi(t);
    if (base < 1e-300) {
      ratios.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double r = phi(2.0 * t) / base;
    if (!std::isfinite(r)) {
      out.unbounded = true;
      out.constant = kInf;
      out.witness = t;
      return out;
    }
    ratios.push_back(r);
    if (r > out.constant) {
      out.constant = r;
      out.witness = t;
    }
  }
  // Still growing at the right end: no finite constant.
  const std::size_t n = ratios.size();
  const std::size_t back = n - 1 - (n - 1) / 10;
  if (std::isfinite(ratios[n - 1]) && std::isfinite(ratios[back]) && ratios[n - 1] > ratios[back] * (1.0 + 1e-6)) {
    out.unbounded = true;
    out.constant = kInf;
    out.witness = ts.back();
  }
  return out;
}

Splitting orlicz_splitting(const TraceAlgebra& alg, const AlgElement& x, double delta, const OrliczFunction& phi,
                           double p, const LogGrid& grid) {
  if (!(delta > 0.0)) throw DomainError("splitting needs delta > 0");
  if (!is_positive(x)) throw DomainError("splitting needs a positive element");
  const double xmax = operator_norm(x);
  const double half = 0.5 * delta;

  LogGrid local = grid;
  local.hi = std::max({delta, 2.0 * xmax, 2.0 * grid.lo});
  const auto conv = p_convexity_check(phi, p, local);
  if (!conv.convex)
    throw HypothesisNotMet("Phi^{1/p} is not convex on [" + fmt_param(local.lo) + ", " + fmt_param(local.hi) +
                           "], witness " + fmt_param(conv.witness));

  const auto root = phi.root(p);
  std::vector<double> lambdas{half};
  for (double t : local.values())
    if (t >= half && t <= std::max(xmax, half)) lambdas.push_back(t);
  for (const auto& sp : spectral_decomposition(alg, x))
    if (sp.eigenvalue >= half) lambdas.push_back(sp.eigenvalue);

  Splitting out;
  for (double l : lambdas) {
    const double r = root(l);
    if (!(r > 0.0) || !std::isfinite(r)) throw NumericError("splitting: Phi^{1/p} vanishes or overflows at " + fmt_param(l));
    out.t = std::max(out.t, l / r);
  }
  if (!std::isfinite(out.t)) throw NumericError("splitting: no finite constant");

  out.x_delta = x * spectral_projection(alg, x, Interval{-kInf, half, true, true});
  const auto rhs = out.x_delta + out.t * functional_calculus(alg, x, [&](double v) { return root(std::max(0.0, v)); });
  out.slack = min_eigenvalue(rhs - x);
  out.holds = out.slack >= -1e-10 * std::max(1.0, xmax);
  return out;
}

AlgElement bounded_truncation(const TraceAlgebra& alg, const AlgElement& x, double n) {
  if (!is_positive(x)) throw DomainError("bounded truncation needs a positive element");
  return x * spectral_projection(alg, x, Interval::left_open(0.0, n));
}

}  // namespace ncerg
