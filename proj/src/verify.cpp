#include "ncerg/verify.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "ncerg/expectation.hpp"

namespace ncerg {

namespace {

using clock_type = std::chrono::steady_clock;

double since(clock_type::time_point t0) { return std::chrono::duration<double>(clock_type::now() - t0).count(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const std::vector<std::vector<int>> kSmallShapes{{2}, {3}, {1, 1}, {2, 1}, {1, 1, 1, 1}, {2, 2},
                                                 {3, 1}, {1, 1, 2}, {4}, {3, 3}, {4, 2}, {1, 2, 3}};

TraceAlgebra weighted_algebra(const std::vector<int>& dims, Rng& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<Block> blocks;
  for (int d : dims) blocks.push_back({d, u(rng)});
  return TraceAlgebra(std::move(blocks), false);
}

Action random_action(const TraceAlgebra& alg, int m, Rng& rng) {
  std::vector<ChannelOperator> gens;
  for (int g = 0; g < m; ++g) gens.push_back(ChannelOperator::inner_automorphism(alg, random_unitary(alg, rng)));
  return Action::group(Alphabet::group(m), alg, std::move(gens));
}

// Random chain with p_{i,-i} = 0 and its stationary law from a linear solve.
SphereChain random_reduced_chain(int m, Rng& rng) {
  const auto a = Alphabet::group(m);
  const auto n = static_cast<Eigen::Index>(a.size());
  std::uniform_real_distribution<double> u(0.1, 1.0);
  RealMatrix p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = u(rng);
    p(i, static_cast<Eigen::Index>(a.index(-a.letter(static_cast<std::size_t>(i))))) = 0.0;
    p.row(i) /= p.row(i).sum();
  }
  RealMatrix sys = p.transpose() - RealMatrix::Identity(n, n);
  sys.row(n - 1).setOnes();
  RealVector rhs = RealVector::Zero(n);
  rhs(n - 1) = 1.0;
  const RealVector pi = sys.fullPivLu().solve(rhs);
  return SphereChain(a, std::move(p), pi);
}

Scenario builtin(const std::string& name) { return build_scenario(ScenarioConfig::parse(builtin_config_text(name))); }

template <class F>
double best_time(int reps, F&& f) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    f();
    best = std::min(best, since(t0));
  }
  return best;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

std::string CriterionResult::line() const {
  return std::string(passed ? "PASS" : "FAIL") + " criterion " + std::to_string(id) + " (" + name + "): " + detail;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    if (first) {
      while (std::getline(ls, cell, ',')) t.header.push_back(cell);
      first = false;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.header.size()) throw Error("CSV row width differs from the header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("missing " + path.string());
  return parse_csv(read_bytes(path));
}

CriterionResult criterion_oracle_equivalence() {
  CriterionResult r{1, "oracle equivalence", false, {}};
  double worst = 0.0, recursive_total = 0.0, brute_total = 0.0;
  for (int s = 0; s < 50; ++s) {
    Rng rng(1000 + static_cast<std::uint64_t>(s));
    const int m = 2 + s % 2;
    const auto alg = weighted_algebra(kSmallShapes[static_cast<std::size_t>(s) % kSmallShapes.size()], rng);
    const auto action = random_action(alg, m, rng);
    // odd seeds at m = 2 use a random non-backtracking chain, the rest the free group walk
    const auto chain = (s % 4 == 1) ? random_reduced_chain(m, rng) : free_group_chain(m);
    const auto x = random_element(alg, rng);
    for (int n = 0; n <= 6; ++n) {
      auto t0 = clock_type::now();
      const auto fast = spherical_avg_recursive(action, chain, n, x);
      recursive_total += since(t0);
      t0 = clock_type::now();
      const auto slow = spherical_avg_bruteforce(action, chain, n, x);
      brute_total += since(t0);
      worst = std::max(worst, max_abs(fast - slow));
    }
  }
  // speed at m = 2, n = 6 on the free rotation pair
  const auto sc = builtin("free_rotation");
  const auto& x = sc.samples[0];
  const double t_fast = best_time(20, [&] { (void)spherical_avg_recursive(sc.action, sc.chain, 6, x); });
  const double t_slow = best_time(5, [&] { (void)spherical_avg_bruteforce(sc.action, sc.chain, 6, x); });
  const double speedup = t_slow / t_fast;
  r.passed = worst <= 1e-10 && speedup >= 50.0 && recursive_total < 1.0;
  r.detail = "max deviation " + fmt(worst) + " (<= 1e-10), speedup at m=2 n=6 " + fmt(speedup) +
             "x (>= 50), recursive engine " + fmt(recursive_total) + " s (< 1 s), brute force " + fmt(brute_total) + " s";
  return r;
}

CriterionResult criterion_contraction() {
  CriterionResult r{2, "contraction", true, {}};
  std::vector<Scenario> scenarios{builtin("permutation8"), builtin("free_rotation"), builtin("random_markov")};
  {
    Rng rng(77);
    const auto alg = weighted_algebra({2, 1}, rng);
    scenarios.push_back({alg, random_action(alg, 3, rng), free_group_chain(3), {}});
  }
  int violations = 0;
  bool positivity = true;
  double worst = 0.0;
  Rng rng(2);
  for (const auto& sc : scenarios)
    for (double p : {1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()}) {
      const auto c = contraction_check(sc.action, sc.chain, p, 500, rng);
      violations += c.violations;
      positivity = positivity && c.positivity;
      worst = std::max(worst, c.worst_ratio);
    }
  r.passed = violations == 0 && positivity;
  r.detail = std::to_string(scenarios.size()) + " scenarios x 4 exponents x 500 tuples, " + std::to_string(violations) +
             " violations, worst ratio " + format_double(worst) + (positivity ? "" : ", positivity lost");
  return r;
}

CriterionResult criterion_identities() {
  CriterionResult r{3, "identities", true, {}};
  std::vector<Scenario> scenarios{builtin("permutation8"), builtin("free_rotation"), builtin("random_markov")};
  {
    Rng rng(78);
    const auto alg = weighted_algebra({2, 1}, rng);
    scenarios.push_back({alg, random_action(alg, 3, rng), free_group_chain(3), {random_element(alg, rng)}});
  }
  double rel1 = 0.0, diag = 0.0, sq = 0.0, rec = 0.0, u2 = 0.0, sym = 0.0;
  std::string signs;
  for (const auto& sc : scenarios) {
    const auto rel = check_relation_even(sc.action, sc.chain, 5);
    for (double v : rel.first) rel1 = std::max(rel1, v);
    signs += (signs.empty() ? "" : ",") + rel.second_sign;
    for (int n = 1; n <= 6; ++n) diag = std::max(diag, diagonal_identity_residual(sc.action, sc.chain, n, sc.samples[0]));
    const auto s = check_s1sq_identity(sc.action, sc.chain, 4, 8);
    for (double v : s.square) sq = std::max(sq, v);
    for (std::size_t i = 1; i < s.recursion.size(); ++i) rec = std::max(rec, s.recursion[i]);  // n = 2..8
    const auto inv = check_involution(sc.action, sc.chain);
    u2 = std::max(u2, inv.square_residual);
    sym = std::max(sym, inv.symmetry_residual);
  }
  r.passed = rel1 <= 1e-9 && diag <= 1e-10 && sq <= 1e-9 && rec <= 1e-9 && u2 <= 1e-12 && sym <= 1e-10;
  r.detail = "relation(1) " + fmt(rel1) + ", diagonal " + fmt(diag) + ", S1^2 " + fmt(sq) + ", recursion " + fmt(rec) +
             ", U^2-id " + fmt(u2) + ", UTU-T* " + fmt(sym) + "; relation(2) sign " + signs;
  return r;
}

CriterionResult criterion_orlicz() {
  CriterionResult r{4, "Orlicz", true, {}};
  const auto t0 = clock_type::now();
  Rng rng(44);
  const auto alg = weighted_algebra({2, 1}, rng);
  std::vector<std::string> bad;

  double lp_dev = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
    const auto phi = OrliczFunction::power(p);
    for (int s = 0; s < 20; ++s) {
      const auto x = random_element(alg, rng);
      const double a = orlicz_norm(alg, x, phi), b = lp_norm(alg, x, p);
      lp_dev = std::max(lp_dev, std::abs(a - b) / b);
    }
  }
  if (lp_dev > 1e-9) bad.push_back("power norms");

  int lemma_violations = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<OrliczFunction> phis{OrliczFunction::llogl(), OrliczFunction::power(2.0)};
  for (int s = 0; s < 1000; ++s) {
    const auto& phi = phis[static_cast<std::size_t>(s % 2)];
    auto x = random_positive(alg, rng);
    x = (unit(rng) / orlicz_norm(alg, x, phi)) * x;
    try {
      lemma_violations += !check_lemma_leq(alg, x, phi).holds;
    } catch (const HypothesisNotMet&) {
      ++lemma_violations;
    }
  }
  if (lemma_violations) bad.push_back("tau(Phi(x)) <= ||x||_Phi");

  int hlp_failures = 0;
  const std::vector<OrliczFunction> hlp_phis{OrliczFunction::llogl(), OrliczFunction::power(3.0),
                                             OrliczFunction::lloglpow(2.0)};
  for (int s = 0; s < 200; ++s) {
    std::vector<ChannelOperator> ops;
    std::vector<double> w;
    for (int k = 0; k < 3; ++k) {
      ops.push_back(ChannelOperator::inner_automorphism(alg, random_unitary(alg, rng)));
      w.push_back(unit(rng) + 0.1);
    }
    const double total = w[0] + w[1] + w[2];
    for (auto& v : w) v /= total;
    const auto t = ChannelOperator::combination(w, ops);
    const auto x = random_element(alg, rng);
    const auto f = s_numbers(alg, t(x));
    const auto g = s_numbers(alg, x);
    try {
      for (const auto& phi : hlp_phis) hlp_failures += !check_hlp(f, g, phi).holds;
    } catch (const HypothesisNotMet&) {
      ++hlp_failures;
    }
  }
  if (hlp_failures) bad.push_back("HLP");

  const auto sq = p_convexity_check(OrliczFunction::power(2.0), 2.0);
  const auto cube = p_convexity_check(OrliczFunction::power(3.0), 3.0);
  const auto psi = p_convexity_check(OrliczFunction::llogl(), 10.0 / 9.0);
  const auto lin = p_convexity_check(OrliczFunction::power(1.0), 2.0);
  if (!sq.convex || !cube.convex) bad.push_back("t^p not p-convex");
  if (!psi.convex) bad.push_back("t log(1+t) not 10/9-convex (witness t = " + fmt(psi.witness) + ")");
  if (lin.convex) bad.push_back("t reported p-convex");

  const double secs = since(t0);
  if (secs >= 10.0) bad.push_back("runtime");
  r.passed = bad.empty();
  r.detail = "power-norm deviation " + fmt(lp_dev) + ", lemma violations " + std::to_string(lemma_violations) +
             "/1000, HLP failures " + std::to_string(hlp_failures) + "/600, p-convex: t^2@2 " +
             (sq.convex ? "yes" : "no") + ", t^3@3 " + (cube.convex ? "yes" : "no") + ", t log(1+t)@10/9 " +
             (psi.convex ? "yes" : "no") + ", t@2 " + (lin.convex ? "yes" : "no") + "; " + fmt(secs) + " s";
  if (!bad.empty()) {
    r.detail += "; failing:";
    for (const auto& b : bad) r.detail += " [" + b + "]";
  }
  return r;
}

CriterionResult criterion_rota() {
  CriterionResult r{5, "Rota", true, {}};
  Rng rng(55);
  const auto m3 = TraceAlgebra::matrix(3);
  const AlgElement phase = AlgElement::diagonal(m3, {cplx(1, 0), cplx(0, 1), cplx(-1, 0)});
  const auto e = conditional_expectation(
      fixed_point_subalgebra({ChannelOperator::inner_automorphism(m3, phase)}, m3));
  double e_dev = 0.0;
  for (int s = 0; s < 5; ++s) {
    const auto x = random_element(m3, rng);
    const auto rep = rota_sequence(e, x, 8);
    for (int n = 1; n <= 8; ++n) e_dev = std::max(e_dev, max_abs(rep.mirrored[static_cast<std::size_t>(n)] - e(x)));
  }
  const auto alg = weighted_algebra({2, 1}, rng);
  const auto aut = ChannelOperator::inner_automorphism(alg, random_unitary(alg, rng));
  double a_dev = 0.0;
  for (int s = 0; s < 5; ++s) {
    const auto x = random_element(alg, rng);
    const auto rep = rota_sequence(aut, x, 8);
    for (int n = 1; n <= 8; ++n) a_dev = std::max(a_dev, max_abs(rep.mirrored[static_cast<std::size_t>(n)] - x));
  }
  const auto nested = nested_shift_realization(2, 2, 3, 8);
  double nested_dev = 0.0;
  bool nested_ok = true;
  for (int s = 0; s < 3; ++s) {
    const auto rep = rota_sequence(nested.t, random_element(nested.alg, rng), 8, nested.expectations);
    nested_ok = nested_ok && rep.nested_ok && rep.nested_residuals.size() == 8;
    for (double v : rep.nested_residuals) nested_dev = std::max(nested_dev, v);
  }
  r.passed = e_dev <= 1e-12 && a_dev <= 1e-12 && nested_ok && nested_dev <= 1e-9;
  r.detail = "T=E " + fmt(e_dev) + ", T=automorphism " + fmt(a_dev) + " (<= 1e-12), nested E E_n " + fmt(nested_dev) +
             " (<= 1e-9, n <= 8)";
  return r;
}

CriterionResult criterion_convergence(const std::filesystem::path& data_dir) {
  CriterionResult r{6, "convergence", true, {}};
  std::vector<std::string> parts;
  for (const std::string name : {"permutation8", "free_rotation"}) {
    const auto config = ScenarioConfig::parse(builtin_config_text(name));
    const auto sc = build_scenario(config);
    const auto rep = convergence_run(config, sc);
    CsvTable committed;
    try {
      committed = read_csv(data_dir / (name + "_convergence.csv"));
    } catch (const std::exception& e) {
      r.passed = false;
      parts.push_back(name + ": " + e.what());
      continue;
    }
    const auto fresh = parse_csv(rep.to_csv());
    double rel = 0.0;
    bool shape = committed.header == fresh.header && committed.rows.size() == fresh.rows.size();
    if (shape)
      for (std::size_t i = 0; i < fresh.rows.size(); ++i)
        for (std::size_t j = 0; j < fresh.rows[i].size(); ++j) {
          const double a = fresh.rows[i][j], b = committed.rows[i][j];
          const double scale = std::max(std::abs(a), std::abs(b));
          if (scale > 0) rel = std::max(rel, std::abs(a - b) / scale);
        }
    std::optional<int> n_committed;
    for (const auto& row : committed.rows)
      if (row.size() > 2 && row[2] <= config.tolerances.target) {
        n_committed = static_cast<int>(row[0]);
        break;
      }
    const auto e2 = even_fixed_expectation(sc.action);
    const auto limit = e2(sc.samples[0]);
    double inv = 0.0;
    for (int g : sc.chain.alphabet().letters())
      for (int h : sc.chain.alphabet().letters())
        inv = std::max(inv, max_abs(sc.action.map(g)(sc.action.map(h)(limit)) - limit));
    const bool ok = shape && rel <= 1e-12 && rep.n_star && n_committed && *rep.n_star <= *n_committed && inv <= 1e-9;
    r.passed = r.passed && ok;
    parts.push_back(name + ": n*=" + (rep.n_star ? std::to_string(*rep.n_star) : "none") +
                    " (committed N*=" + (n_committed ? std::to_string(*n_committed) : "none") + "), curve drift " +
                    fmt(rel) + ", invariance " + fmt(inv) + (shape ? "" : ", CSV shape differs"));
  }

  // power averages of S_1 and merging under the uniform two-letter semigroup walk
  const auto rot = builtin("free_rotation");
  const auto s1 = spherical_operator(rot.action, rot.chain, 1);
  const auto pa = semigroup_power_average(s1, rot.samples[0], 60);
  const auto semi = Action::semigroup(Alphabet::semigroup(2), rot.alg, {rot.action.map(1), rot.action.map(2)});
  const auto chain = uniform_semigroup_chain(2);
  const auto xhat = direct_sum_limit(semi, chain, {rot.samples[0], rot.samples[1]});
  const auto merge = merge_limits_check(semi, chain, xhat, 4);
  const bool ok = pa.fixed_residual <= 1e-9 && merge.merged;
  r.passed = r.passed && ok;
  parts.push_back("power average ||T xhat - xhat|| " + fmt(pa.fixed_residual) + ", merging " + fmt(merge.pairwise) +
                  "/" + fmt(merge.invariance));
  for (std::size_t i = 0; i < parts.size(); ++i) r.detail += (i ? "; " : "") + parts[i];
  return r;
}

CriterionResult criterion_certification() {
  CriterionResult r{7, "certification", true, {}};
  int certified = 0, failed = 0;
  auto certify = [&](const ChannelOperator& t) {
    const auto rep = certify_markov(t, 16);
    (rep.markov && rep.linf_contraction && rep.l1_contraction ? certified : failed)++;
  };
  for (const std::string name : {"permutation8", "free_rotation", "random_markov"}) {
    const auto sc = builtin(name);
    const int m = sc.chain.alphabet().m();
    const auto fam = chebyshev_family(spherical_operator(sc.action, sc.chain, 1), (2.0 * m - 1) / (2.0 * m), 6);
    for (int n = 1; n <= 6; ++n) {
      certify(spherical_operator(sc.action, sc.chain, n));
      certify(cesaro_operator(sc.action, sc.chain, n));
      certify(mn_operator(fam, n));
    }
  }
  Rng rng(70);
  int half_violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < 1000; ++s) {
    Rng local(7000 + static_cast<std::uint64_t>(s));
    const auto alg = s % 2 ? TraceAlgebra::matrix(3) : weighted_algebra({2, 1}, local);
    const auto hp = half_projection(alg, random_effect(alg, rng));
    worst = std::max(worst, hp.defect - hp.bound);
    half_violations += hp.defect > hp.bound + 1e-12;
  }
  r.passed = failed == 0 && half_violations == 0;
  r.detail = std::to_string(certified) + "/" + std::to_string(certified + failed) +
             " operators Markov and contractive, half projection violations " + std::to_string(half_violations) +
             "/1000 (max defect - bound " + fmt(worst) + ")";
  return r;
}

CriterionResult criterion_determinism() {
  CriterionResult r{8, "determinism", true, {}};
  const auto root = std::filesystem::temp_directory_path() / ("ncerg-determinism-" + std::to_string(::getpid()));
  std::vector<std::string> parts;
  for (const std::string name : {"permutation8", "random_markov"}) {
    const auto config = ScenarioConfig::parse(builtin_config_text(name));
    RunOptions a, b;
    a.out = root / name / "a";
    b.out = root / name / "b";
    const auto ra = run_experiment(config, a);
    const auto rb = run_experiment(config, b);
    bool same = ra.csv_paths.size() == rb.csv_paths.size();
    for (std::size_t i = 0; same && i < ra.csv_paths.size(); ++i)
      same = read_bytes(ra.csv_paths[i]) == read_bytes(rb.csv_paths[i]);
    r.passed = r.passed && same;
    parts.push_back(name + (same ? " identical" : " DIFFERENT") + " (" + std::to_string(ra.csv_paths.size()) + " CSVs)");
  }
  std::error_code ec;
  std::filesystem::remove_all(root, ec);
  for (std::size_t i = 0; i < parts.size(); ++i) r.detail += (i ? ", " : "") + parts[i];
  return r;
}

std::vector<CriterionResult> run_suite(const std::string& suite, const std::filesystem::path& data_dir) {
  std::vector<int> ids;
  if (suite == "all") ids = {1, 2, 3, 4, 5, 6, 7, 8};
  else if (suite == "identities") ids = {1, 2, 3, 5, 7};
  else if (suite == "orlicz") ids = {4};
  else if (suite == "convergence") ids = {6, 8};
  else throw ConfigError("unknown suite '" + suite + "'");
  std::vector<CriterionResult> out;
  for (int id : ids) {
    try {
      switch (id) {
        case 1: out.push_back(criterion_oracle_equivalence()); break;
        case 2: out.push_back(criterion_contraction()); break;
        case 3: out.push_back(criterion_identities()); break;
        case 4: out.push_back(criterion_orlicz()); break;
        case 5: out.push_back(criterion_rota()); break;
        case 6: out.push_back(criterion_convergence(data_dir)); break;
        case 7: out.push_back(criterion_certification()); break;
        case 8: out.push_back(criterion_determinism()); break;
      }
    } catch (const std::exception& e) {
      out.push_back({id, "criterion " + std::to_string(id), false, std::string("threw: ") + e.what()});
    }
  }
  return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

}  // namespace ncerg
