#include "ncerg/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ncerg {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 0x5eed;

const std::map<std::string, std::string>& builtins() {
  static const std::map<std::string, std::string> table{
      {"permutation8", R"({
  "name": "permutation8",
  "kind": "permutation",
  "m": 2,
  "permutations": [[1, 2, 3, 4, 5, 6, 7, 0], [2, 7, 4, 1, 6, 3, 0, 5]],
  "orlicz": ["power:2", "llogl"],
  "n_max": 30,
  "seed": 7,
  "output_dir": "out/permutation8"
})"},
      {"permutation2", R"({
  "name": "permutation2",
  "kind": "permutation",
  "m": 2,
  "permutations": [[1, 0], [0, 1]],
  "orlicz": ["power:2", "llogl"],
  "n_max": 16,
  "seed": 3,
  "output_dir": "out/permutation2"
})"},
      {"free_rotation", R"({
  "name": "free_rotation",
  "kind": "free_rotation",
  "m": 2,
  "algebra": {"dims": [3], "normalized": true},
  "orlicz": ["power:2", "llogl"],
  "n_max": 30,
  "seed": 11,
  "output_dir": "out/free_rotation"
})"},
      {"random_markov", R"({
  "name": "random_markov",
  "kind": "random_markov",
  "m": 2,
  "algebra": {"dims": [2, 1], "normalized": true},
  "orlicz": ["power:2", "llogl"],
  "n_max": 20,
  "seed": 2024,
  "output_dir": "out/random_markov"
})"},
  };
  return table;
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": wrong type");
  }
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

cplx parse_entry(const json& e, const std::string& where) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw ConfigError(where + ": entries are numbers or [re, im] pairs");
}

Matrix parse_matrix(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw ConfigError(where + ": expected a non-empty list of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError(where + ": matrix is not square");
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = parse_entry(row[static_cast<std::size_t>(j)], where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return out;
}

ScenarioKind parse_kind(const std::string& s) {
  if (s == "permutation") return ScenarioKind::permutation;
  if (s == "free_rotation") return ScenarioKind::free_rotation;
  if (s == "custom_unitaries") return ScenarioKind::custom_unitaries;
  if (s == "random_markov") return ScenarioKind::random_markov;
  throw ConfigError("kind: unknown scenario kind '" + s + "'");
}

std::vector<Block> default_blocks(const std::vector<int>& dims, bool normalized) {
  double total = 0.0;
  for (int d : dims) total += d;
  std::vector<Block> out;
  for (int d : dims) out.push_back({d, normalized ? 1.0 / total : 1.0});
  return out;
}

// Rotation by the angle with cosine 3/5 about coordinate axis `axis`.
Matrix rational_rotation(int axis) {
  Matrix r = Matrix::Identity(3, 3);
  const int a = (axis + 1) % 3, b = (axis + 2) % 3;
  r(a, a) = 0.6;
  r(a, b) = -0.8;
  r(b, a) = 0.8;
  r(b, b) = 0.6;
  return r;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << body;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const char* kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::permutation: return "permutation";
    case ScenarioKind::free_rotation: return "free_rotation";
    case ScenarioKind::custom_unitaries: return "custom_unitaries";
    case ScenarioKind::random_markov: return "random_markov";
  }
  return "?";
}

std::vector<std::string> builtin_scenarios() {
  std::vector<std::string> out;
  for (const auto& [name, text] : builtins()) out.push_back(name);
  return out;
}

std::string builtin_config_text(const std::string& name) {
  const auto it = builtins().find(name);
  if (it == builtins().end()) throw ConfigError("no builtin scenario named '" + name + "'");
  return it->second;
}

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"name", "kind", "m", "algebra", "orlicz", "n_max", "oracle_n_max", "seed", "tolerances", "output_dir",
                  "permutations", "unitaries"},
                 "config");
  ScenarioConfig c;
  if (!j.contains("kind")) throw ConfigError("config: 'kind' is required");
  c.kind = parse_kind(get_as<std::string>(j["kind"], "kind"));
  c.name = j.contains("name") ? get_as<std::string>(j["name"], "name") : kind_name(c.kind);
  if (j.contains("m")) c.m = get_as<int>(j["m"], "m");
  if (c.m < 1) throw ConfigError("m: must be >= 1");
  if (j.contains("n_max")) c.n_max = get_as<int>(j["n_max"], "n_max");
  if (c.n_max < 1) throw ConfigError("n_max: must be >= 1");
  if (j.contains("oracle_n_max")) c.oracle_n_max = get_as<int>(j["oracle_n_max"], "oracle_n_max");
  if (c.oracle_n_max < 0) throw ConfigError("oracle_n_max: must be >= 0");
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j["output_dir"], "output_dir");
  if (j.contains("orlicz")) {
    c.orlicz = get_as<std::vector<std::string>>(j["orlicz"], "orlicz");
    for (std::size_t i = 0; i < c.orlicz.size(); ++i) {
      try {
        OrliczFunction::parse(c.orlicz[i]);
      } catch (const Error& e) {
        throw ConfigError("orlicz[" + std::to_string(i) + "]: " + e.what());
      }
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    reject_unknown(t, {"identity", "diagonal", "contraction", "target"}, "tolerances");
    if (t.contains("identity")) c.tolerances.identity = get_as<double>(t["identity"], "tolerances.identity");
    if (t.contains("diagonal")) c.tolerances.diagonal = get_as<double>(t["diagonal"], "tolerances.diagonal");
    if (t.contains("contraction")) c.tolerances.contraction = get_as<double>(t["contraction"], "tolerances.contraction");
    if (t.contains("target")) c.tolerances.target = get_as<double>(t["target"], "tolerances.target");
  }

  std::vector<int> dims;
  std::optional<std::vector<double>> weights;
  if (j.contains("algebra")) {
    const auto& a = j["algebra"];
    reject_unknown(a, {"dims", "weights", "normalized"}, "algebra");
    if (!a.contains("dims")) throw ConfigError("algebra: 'dims' is required");
    dims = get_as<std::vector<int>>(a["dims"], "algebra.dims");
    if (a.contains("weights")) weights = get_as<std::vector<double>>(a["weights"], "algebra.weights");
    if (a.contains("normalized")) c.normalized = get_as<bool>(a["normalized"], "algebra.normalized");
  }

  if (j.contains("permutations")) {
    if (c.kind != ScenarioKind::permutation) throw ConfigError("permutations: only valid for kind 'permutation'");
    c.permutations = get_as<std::vector<std::vector<int>>>(j["permutations"], "permutations");
  }
  if (j.contains("unitaries")) {
    if (c.kind != ScenarioKind::custom_unitaries) throw ConfigError("unitaries: only valid for kind 'custom_unitaries'");
    const auto& us = j["unitaries"];
    if (!us.is_array()) throw ConfigError("unitaries: expected a list");
    for (std::size_t g = 0; g < us.size(); ++g) {
      const std::string where = "unitaries[" + std::to_string(g) + "]";
      if (!us[g].is_array()) throw ConfigError(where + ": expected a list of blocks");
      std::vector<Matrix> blocks;
      for (std::size_t k = 0; k < us[g].size(); ++k)
        blocks.push_back(parse_matrix(us[g][k], where + "[" + std::to_string(k) + "]"));
      c.unitaries.push_back(std::move(blocks));
    }
  }

  switch (c.kind) {
    case ScenarioKind::permutation: {
      if (c.permutations.size() != static_cast<std::size_t>(c.m))
        throw ConfigError("permutations: need one permutation per generator (m = " + std::to_string(c.m) + ")");
      const std::size_t points = c.permutations[0].size();
      if (dims.empty()) dims.assign(points, 1);
      if (dims.size() != points || std::any_of(dims.begin(), dims.end(), [](int d) { return d != 1; }))
        throw ConfigError("algebra: permutation scenarios act on one-dimensional blocks, one per point");
      break;
    }
    case ScenarioKind::free_rotation:
      if (c.m != 2) throw ConfigError("m: free_rotation has exactly two generators");
      if (dims.empty()) dims = {3};
      if (dims != std::vector<int>{3}) throw ConfigError("algebra: free_rotation lives on a single 3x3 block");
      break;
    case ScenarioKind::custom_unitaries:
      if (c.unitaries.size() != static_cast<std::size_t>(c.m))
        throw ConfigError("unitaries: need one unitary per generator (m = " + std::to_string(c.m) + ")");
      if (dims.empty())
        for (const auto& b : c.unitaries[0]) dims.push_back(static_cast<int>(b.rows()));
      break;
    case ScenarioKind::random_markov:
      if (dims.empty()) throw ConfigError("algebra: random_markov needs block dimensions");
      break;
  }
  if (std::any_of(dims.begin(), dims.end(), [](int d) { return d < 1; }))
    throw ConfigError("algebra.dims: dimensions must be >= 1");
  if (weights) {
    if (weights->size() != dims.size()) throw ConfigError("algebra.weights: one weight per block");
    for (std::size_t k = 0; k < dims.size(); ++k) c.blocks.push_back({dims[k], (*weights)[k]});
  } else {
    c.blocks = default_blocks(dims, c.normalized);
  }
  try {
    TraceAlgebra(c.blocks, c.normalized);
  } catch (const Error& e) {
    throw ConfigError(std::string("algebra: ") + e.what());
  }
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path_or_builtin) {
  const std::string prefix = "builtin:";
  if (path_or_builtin.rfind(prefix, 0) == 0) return parse(builtin_config_text(path_or_builtin.substr(prefix.size())));
  std::ifstream is(path_or_builtin);
  if (!is) throw ConfigError("cannot open config '" + path_or_builtin + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

Scenario build_scenario(const ScenarioConfig& c) {
  if (c.kind == ScenarioKind::random_markov && !c.seed) throw ConfigError("seed: random_markov needs a seed");
  const TraceAlgebra alg(c.blocks, c.normalized);
  const auto alphabet = Alphabet::group(c.m);
  Rng rng(c.seed.value_or(kDefaultSeed));

  std::vector<ChannelOperator> gens;
  for (int g = 0; g < c.m; ++g) {
    const std::string where = "generator " + std::to_string(g + 1);
    try {
      switch (c.kind) {
        case ScenarioKind::permutation:
          gens.push_back(ChannelOperator::block_permutation(alg, c.permutations[static_cast<std::size_t>(g)]));
          break;
        case ScenarioKind::free_rotation:
          gens.push_back(ChannelOperator::inner_automorphism(alg, AlgElement({rational_rotation(g == 0 ? 2 : 0)})));
          break;
        case ScenarioKind::custom_unitaries: {
          const AlgElement u(c.unitaries[static_cast<std::size_t>(g)]);
          if (!u.matches(alg)) throw ConfigError("unitaries[" + std::to_string(g) + "]: blocks do not match the algebra");
          if (max_abs(u.adjoint() * u - AlgElement::identity(alg)) > 1e-10)
            throw ConfigError("unitaries[" + std::to_string(g) + "]: not unitary within 1e-10");
          gens.push_back(ChannelOperator::inner_automorphism(alg, u));
          break;
        }
        case ScenarioKind::random_markov:
          gens.push_back(ChannelOperator::inner_automorphism(alg, random_unitary(alg, rng)));
          break;
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  std::optional<Action> action;
  try {
    action = Action::group(alphabet, alg, std::move(gens));
  } catch (const Error& e) {
    throw ConfigError(std::string("action: ") + e.what());
  }
  std::vector<AlgElement> samples;
  for (int s = 0; s < 4; ++s) samples.push_back(random_self_adjoint(alg, rng));
  return {alg, std::move(*action), free_group_chain(c.m), std::move(samples)};
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed || !c.hard; });
}

std::string RunReport::text() const {
  std::ostringstream os;
  os << scenario_echo << "\nversion " << version << "\n\n";
  for (const auto& c : checks) {
    os << (c.passed ? "PASS" : c.hard ? "FAIL" : "soft") << "  " << c.phase << '/' << c.name
       << "  residual=" << format_double(c.residual);
    if (!c.note.empty()) os << "  (" << c.note << ')';
    os << '\n';
  }
  os << '\n' << convergence.summary();
  for (const auto& p : csv_paths) os << "csv: " << p.string() << '\n';
  for (const auto& [phase, s] : phase_seconds) os << "time " << phase << ": " << s << " s\n";
  os << (passed() ? "RESULT: pass\n" : "RESULT: fail\n");
  return os.str();
}

ConvergenceReport convergence_run(const ScenarioConfig& config, const Scenario& scenario) {
  std::vector<OrliczFunction> phis;
  for (const auto& name : config.orlicz) phis.push_back(OrliczFunction::parse(name));
  return converge_even_spheres(scenario.action, scenario.chain, scenario.samples[0], config.n_max, phis,
                               config.tolerances.target);
}

RunReport run_experiment(const ScenarioConfig& config_in, const RunOptions& options) {
  auto config = config_in;
  if (options.seed) config.seed = options.seed;
  if (!options.no_oracle && sphere_size(Alphabet::group(config.m), config.oracle_n_max) > kSphereGuard)
    throw ResourceError("oracle radius " + std::to_string(config.oracle_n_max) +
                        " exceeds the brute-force guard; use --no-oracle or lower oracle_n_max");
  const auto sc = build_scenario(config);
  const auto& tol = config.tolerances;
  const int m = config.m;
  const auto& x = sc.samples[0];

  RunReport rep;
  rep.version = kVersion;
  {
    std::ostringstream os;
    os << "scenario " << config.name << " kind=" << kind_name(config.kind) << " m=" << m << " dims=[";
    for (std::size_t k = 0; k < config.blocks.size(); ++k) os << (k ? "," : "") << config.blocks[k].dim;
    os << "] n_max=" << config.n_max << " seed=" << (config.seed ? std::to_string(*config.seed) : "default");
    rep.scenario_echo = os.str();
  }
  std::string phase;
  auto check = [&](std::string name, bool passed, double residual, std::string note = {}, bool hard = true) {
    rep.checks.push_back({phase, std::move(name), passed, hard, residual, std::move(note)});
  };
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const ResourceError&) {
      throw;
    } catch (const Error& e) {
      check(name, false, std::numeric_limits<double>::quiet_NaN(), e.what());
    }
  };

  // certification
  phase = "certification";
  auto t0 = std::chrono::steady_clock::now();
  for (int g = 1; g <= m; ++g) {
    const auto r = certify_markov(sc.action.map(g), 16, config.seed.value_or(kDefaultSeed));
    check("generator " + std::to_string(g), r.markov && r.linf_contraction && r.l1_contraction,
          std::max(r.linf_ratio, r.l1_ratio) - 1.0);
  }
  const int cert_n = std::min(6, 2 * config.n_max);
  for (int n = 1; n <= cert_n; ++n) {
    guarded("S_" + std::to_string(n), [&] {
      check("S_" + std::to_string(n), spherical_operator(sc.action, sc.chain, n).is_markov(), 0.0);
    });
    guarded("A_" + std::to_string(n), [&] {
      check("A_" + std::to_string(n), cesaro_operator(sc.action, sc.chain, n).is_markov(), 0.0);
    });
  }
  if (m >= 2) {
    guarded("chebyshev family", [&] {
      const double lambda = (2.0 * m - 1) / (2.0 * m);
      const auto fam = chebyshev_family(spherical_operator(sc.action, sc.chain, 1), lambda, cert_n);
      double worst = 0.0;
      for (int n = 0; n <= cert_n; ++n)
        worst = std::max(worst, max_abs_diff(fam.members[static_cast<std::size_t>(n)].matrix(),
                                             spherical_operator(sc.action, sc.chain, n).matrix()));
      check("T_n = S_n", worst <= tol.identity, worst);
      bool mn = true;
      for (int n = 0; n <= cert_n; ++n) mn = mn && mn_operator(fam, n).is_markov();
      check("M_n Markov", mn, 0.0);
    });
  } else {
    check("chebyshev family", true, 0.0, "skipped: lambda = 1/2 when m = 1", false);
  }
  rep.phase_seconds.emplace_back(phase, seconds_since(t0));

  // identities
  phase = "identities";
  t0 = std::chrono::steady_clock::now();
  if (!options.no_oracle) {
    guarded("oracle equivalence", [&] {
      double worst = 0.0;
      for (int n = 0; n <= config.oracle_n_max; ++n)
        worst = std::max(worst, max_abs(spherical_avg_bruteforce(sc.action, sc.chain, n, x) -
                                        spherical_avg_recursive(sc.action, sc.chain, n, x)));
      check("oracle equivalence", worst <= tol.diagonal, worst);
    });
    guarded("diagonal identity", [&] {
      double worst = 0.0;
      for (int n = 1; n <= config.oracle_n_max; ++n)
        worst = std::max(worst, diagonal_identity_residual(sc.action, sc.chain, n, x));
      check("diagonal identity", worst <= tol.diagonal, worst);
    });
  } else {
    check("oracle equivalence", true, 0.0, "skipped: --no-oracle", false);
  }
  if (m >= 2) {
    guarded("relation", [&] {
      const auto r = check_relation_even(sc.action, sc.chain, 5);
      const double first = *std::max_element(r.first.begin(), r.first.end());
      check("relation (1)", first <= tol.identity, first);
      const double minus = *std::max_element(r.second_minus.begin(), r.second_minus.end());
      const double plus = *std::max_element(r.second_plus.begin(), r.second_plus.end());
      check("relation (2)", r.second_sign != "neither", std::min(minus, plus), "sign " + r.second_sign, false);
    });
  } else {
    check("relation", true, 0.0, "skipped: m = 1, the coefficients divide by 2m - 2", false);
  }
  guarded("S_1 identities", [&] {
    const auto r = check_s1sq_identity(sc.action, sc.chain, 4, 8);
    const double sq = *std::max_element(r.square.begin(), r.square.end());
    const double rec = *std::max_element(r.recursion.begin() + 1, r.recursion.end());
    check("S_1^2 identity", sq <= tol.identity, sq);
    check("one-step recursion", rec <= tol.identity, rec);
  });
  guarded("involution", [&] {
    const auto r = check_involution(sc.action, sc.chain);
    check("U^2 = id", r.square_residual <= 1e-12, r.square_residual);
    check("UTU = T*", r.symmetry_residual <= 1e-10, r.symmetry_residual);
  });
  {
    Rng rng(config.seed.value_or(kDefaultSeed) + 1);
    for (double p : {1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()}) {
      const auto r = contraction_check(sc.action, sc.chain, p, 100, rng);
      check("contraction p=" + format_double(p), r.violations == 0 && r.positivity, r.worst_ratio - 1.0);
    }
  }
  rep.phase_seconds.emplace_back(phase, seconds_since(t0));

  // convergence
  phase = "convergence";
  t0 = std::chrono::steady_clock::now();
  std::string cesaro_csv = "n,err_inf,err_l2\n";
  std::string semigroup_csv = "n,dist_l2\n";
  guarded("even spheres", [&] {
    rep.convergence = convergence_run(config, sc);
    const auto& c = rep.convergence;
    check("even spheres reach target", c.n_star.has_value(), c.rows.empty() ? 0.0 : c.rows.back().err_l2,
          c.n_star ? "radius " + std::to_string(*c.n_star) : "not reached");
  });
  guarded("limit invariance", [&] {
    const auto e2 = even_fixed_expectation(sc.action);
    const auto limit = e2(x);
    double worst = 0.0;
    for (int g : sc.chain.alphabet().letters())
      for (int h : sc.chain.alphabet().letters())
        worst = std::max(worst, max_abs(sc.action.map(g)(sc.action.map(h)(limit)) - limit));
    check("limit invariance", worst <= tol.identity, worst);

    const auto s1 = spherical_operator(sc.action, sc.chain, 1);
    const auto target = 0.5 * (limit + s1(limit));
    const auto cav = [&](int n) { return cesaro_average(sc.action, sc.chain, n, x).total; };
    double last = 0.0;
    for (int n = 1; n <= 2 * config.n_max; ++n) {
      const auto d = cav(n) - target;
      last = lp_norm(sc.alg, d, 2.0);
      cesaro_csv += std::to_string(n) + ',' + format_double(operator_norm(d)) + ',' + format_double(last) + '\n';
    }
    check("Cesaro averages", true, last, "O(1/n) tail, reported only", false);

    const auto pa = semigroup_power_average(s1, x, 2 * config.n_max);
    for (std::size_t k = 0; k < pa.distance.size(); ++k)
      semigroup_csv += std::to_string(k + 1) + ',' + format_double(pa.distance[k]) + '\n';
    check("power average fixed point", pa.fixed_residual <= tol.identity, pa.fixed_residual,
          "fitted C = " + format_double(pa.fitted_c));
  });
  rep.phase_seconds.emplace_back(phase, seconds_since(t0));

  if (options.write) {
    const std::filesystem::path out = options.out ? *options.out : std::filesystem::path(config.output_dir);
    std::filesystem::create_directories(out);
    write_file(out / "convergence.csv", rep.convergence.to_csv());
    write_file(out / "cesaro.csv", cesaro_csv);
    write_file(out / "semigroup.csv", semigroup_csv);
    rep.csv_paths = {out / "convergence.csv", out / "cesaro.csv", out / "semigroup.csv"};
    write_file(out / "summary.txt", rep.text());
  }
  return rep;
}

}  // namespace ncerg
