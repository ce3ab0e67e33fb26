// eqres: command-line front end for the zeta, residue, counting, Dixmier and
// stationary-phase pipelines.
//
// Exit status: 0 success, 2 invalid input, 3 numerical diagnostic failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "eqres/io.hpp"

using namespace eqres;

namespace {

struct Config {
  std::string model = "circle";
  std::string group;
  std::string action;
  long Kmax = 0;
  long Lmax = 0;
  std::string op = "Id";
  std::string pi;
  std::string relative;
  int cls = -1;
  std::string out;
  unsigned seed = 2024;
  double tol = 1e-6;
  double lmax = 0;
  long terms = 100000;
  std::string problem = "gaussian";
  int order = 1;
  double rmin = 1e3, rmax = 1e5;
  int points = 10;
  std::vector<int> only;
};

// default truncations when neither --Kmax nor --Lmax is given
long m_default(const Config& c) {
  if (c.model == "torus") return 200;
  if (c.model == "sphere") return 100;
  return 512;
}

// ---------------------------------------------------------------- parsing helpers

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string p;
  while (std::getline(ss, p, sep)) parts.push_back(p);
  return parts;
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorKind::invalid_parameter, "bad integer '" + s + "' in " + what);
}

struct OperatorSpec {
  enum Kind { power, symbol } kind = power;
  int s = 0;
  CircleSymbol sym;
  std::string text;
};

OperatorSpec parse_operator(const std::string& text, unsigned seed) {
  OperatorSpec o;
  o.text = text;
  if (text == "Id") return o;
  if (text.rfind("D^", 0) == 0) {
    o.s = static_cast<int>(parse_long(text.substr(2), "--operator"));
    return o;
  }
  if (text.rfind("symbol:", 0) == 0) {
    o.kind = OperatorSpec::symbol;
    o.sym = read_symbol_file(text.substr(7));
    return o;
  }
  if (text.rfind("random:", 0) == 0) {
    o.kind = OperatorSpec::symbol;
    std::mt19937 rng(seed);
    o.sym = random_symbol(rng, static_cast<int>(parse_long(text.substr(7), "--operator")), 2);
    return o;
  }
  fail(ErrorKind::invalid_parameter, "operator must be Id, D^s, symbol:PATH or random:ORDER, got '" + text + "'");
}

CircleAction circle_group(const std::string& g) {
  if (g.empty() || g == "trivial") return circle_rotation_action(1);
  if (g == "reflection") return circle_reflection_action();
  const auto p = split(g, ':');
  require(p.size() >= 2 && p.size() <= 3, ErrorKind::invalid_parameter, "group must be cyclic:N[:step], dihedral:N or reflection");
  const long N = parse_long(p[1], "--group");
  require(N >= 1 && N <= 64, ErrorKind::invalid_parameter, "group order must be in [1, 64]");
  if (p[0] == "cyclic") return circle_rotation_action(int(N), p.size() == 3 ? int(parse_long(p[2], "--group")) : 1);
  require(p[0] == "dihedral" && p.size() == 2, ErrorKind::invalid_parameter, "unknown group '" + g + "'");
  return N == 1 ? circle_reflection_action() : circle_dihedral_action(int(N));
}

SphereAction sphere_group(const std::string& g) {
  if (g.empty() || g == "trivial") return sphere_rotation_action(1);
  if (g == "reflection" || g == "dihedral:1") return sphere_reflection_action();
  const auto p = split(g, ':');
  require(p.size() >= 2 && p.size() <= 3 && p[0] == "cyclic", ErrorKind::unsupported_group,
          "sphere groups are cyclic:N[:j] rotations or the reflection");
  const long N = parse_long(p[1], "--group");
  require(N >= 1 && N <= 64, ErrorKind::invalid_parameter, "group order must be in [1, 64]");
  return sphere_rotation_action(int(N), p.size() == 3 ? int(parse_long(p[2], "--group")) : 1);
}

TorusAction torus_group(const std::string& a) {
  const std::string name = a.empty() ? "identity" : a;
  if (name.find(',') == std::string::npos) return torus_named_action(name);
  const auto p = split(name, ',');
  require(p.size() == 4, ErrorKind::invalid_parameter, "matrix action is a,b,c,d (row major)");
  IntMatrix2 M{};
  M.a = parse_long(p[0], "--action");
  M.b = parse_long(p[1], "--action");
  M.c = parse_long(p[2], "--action");
  M.d = parse_long(p[3], "--action");
  return torus_action(M, name);
}

// ---------------------------------------------------------------- model assembly

struct Model {
  std::optional<CircleAction> circle;
  std::optional<TorusAction> torus;
  std::optional<SphereAction> sphere;
  long truncation = 0;
};

Model make_model(const Config& c, long auto_truncation) {
  Model m;
  require(c.model == "circle" || c.model == "torus" || c.model == "sphere", ErrorKind::invalid_parameter,
          "model must be circle, torus or sphere");
  if (c.model == "sphere") {
    require(c.Kmax == 0, ErrorKind::invalid_parameter, "the sphere is truncated with --Lmax");
    require(c.action.empty(), ErrorKind::invalid_parameter, "--action applies to the torus only");
    m.sphere = sphere_group(c.group);
    m.truncation = c.Lmax ? c.Lmax : auto_truncation;
  } else {
    require(c.Lmax == 0, ErrorKind::invalid_parameter, "--Lmax applies to the sphere only");
    m.truncation = c.Kmax ? c.Kmax : auto_truncation;
    if (c.model == "torus") {
      require(c.group.empty(), ErrorKind::invalid_parameter, "torus groups are given by --action");
      m.torus = torus_group(c.action);
    } else {
      require(c.action.empty(), ErrorKind::invalid_parameter, "--action applies to the torus only");
      m.circle = circle_group(c.group);
    }
  }
  return m;
}

EquivariantSpectrum build_spectrum(const Model& m) {
  if (m.circle) return circle_spectrum(*m.circle, m.truncation);
  if (m.torus) return torus_spectrum(*m.torus, m.truncation);
  return sphere_spectrum(*m.sphere, m.truncation);
}

std::size_t group_order(const Model& m) {
  if (m.circle) return m.circle->group->order();
  if (m.torus) return m.torus->group->order();
  return m.sphere->group->order();
}

std::vector<std::size_t> selected_classes(const Config& c, std::size_t count) {
  if (c.cls < 0) {
    std::vector<std::size_t> all(count);
    for (std::size_t i = 0; i < count; ++i) all[i] = i;
    return all;
  }
  require(std::size_t(c.cls) < count, ErrorKind::invalid_parameter,
          "--class " + std::to_string(c.cls) + " out of range (" + std::to_string(count) + " classes)");
  return {std::size_t(c.cls)};
}

ClassFunction irrep_of(const EquivariantSpectrum& s, const std::string& name) {
  require(!name.empty(), ErrorKind::invalid_parameter, "--pi is required");
  const auto t = character_table(s.group);
  return t.irreps[t.find(name)];
}

ContinuationOptions fit_options(const Config& c) {
  ContinuationOptions o;
  o.residual_tol = c.tol;
  return o;
}

// ---------------------------------------------------------------- output

struct Run {
  const Config& cfg;
  std::string command;
  json result = json::object();
  std::optional<CsvTable> csv;
  std::vector<std::string> summary;
  long truncation = 0;
};

json config_json(const Config& c, const std::string& command) {
  json j{{"command", command}, {"model", c.model}, {"seed", c.seed}, {"tol", c.tol}};
  if (!c.group.empty()) j["group"] = c.group;
  if (!c.action.empty()) j["action"] = c.action;
  if (c.Kmax) j["Kmax"] = c.Kmax;
  if (c.Lmax) j["Lmax"] = c.Lmax;
  if (command == "zeta" || command == "residues") j["operator"] = c.op;
  if (!c.pi.empty()) j["pi"] = c.pi;
  if (!c.relative.empty()) j["relative"] = c.relative;
  if (c.cls >= 0) j["class"] = c.cls;
  if (c.lmax > 0) j["lmax"] = c.lmax;
  if (command == "dixmier") j["terms"] = c.terms;
  if (command == "stationary-phase") {
    j["problem"] = c.problem;
    j["order"] = c.order;
    j["rmin"] = c.rmin;
    j["rmax"] = c.rmax;
    j["points"] = c.points;
  }
  return j;
}

void emit(Run& r) {
  static const Calibration cal = calibrate_local_residue();
  ContinuationOptions defaults;
  json doc{{"config", config_json(r.cfg, r.command)},
           {"truncation", r.truncation},
           {"tolerances",
            {{"fit_residual", r.cfg.tol},
             {"condition_cap", defaults.condition_cap},
             {"integrality", integrality_tol},
             {"heat_window", {defaults.t_min, defaults.t_max}}}},
           {"calibration", to_json(cal)},
           {"seed", r.cfg.seed},
           {"result", r.result}};
  if (r.cfg.out.empty()) {
    for (const auto& line : r.summary) std::cerr << line << '\n';
    std::cout << doc.dump(2) << std::endl;
    return;
  }
  save_json(doc, r.cfg.out + ".json");
  if (r.csv) r.csv->save(r.cfg.out + ".csv");
  for (const auto& line : r.summary) std::cout << line << '\n';
  std::cout << "wrote " << r.cfg.out << ".json" << (r.csv ? " and " + r.cfg.out + ".csv" : "") << std::endl;
}

std::string g6(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

std::string g6(cplx z) {
  if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z.real()))) return g6(z.real());
  return g6(z.real()) + (z.imag() < 0 ? "-" : "+") + g6(std::abs(z.imag())) + "i";
}

// ---------------------------------------------------------------- pipelines

void run_zeta(Run& r) {
  const auto& c = r.cfg;
  const auto op = parse_operator(c.op, c.seed);
  require(op.kind == OperatorSpec::power, ErrorKind::invalid_parameter, "zeta takes Id or D^s; use residues for symbols");
  const auto m = make_model(c, m_default(c));
  r.truncation = m.truncation;
  const auto spec = build_spectrum(m);
  const auto opt = fit_options(c);
  json classes = json::array();
  CsvTable theta({"class", "t", "theta_re", "theta_im", "tail_bound"});
  r.summary.push_back("class  representative  d  leading pole  residue");
  for (std::size_t cls : selected_classes(c, spec.class_count())) {
    const int d = spec.fixed.classes[cls].pole_dim() + op.s;
    const auto series = op.s ? spec.series(cls).times_power(op.s) : spec.series(cls);
    const auto mz = meromorphic_continue_checked(series, d, opt);
    json e = to_json(mz);
    e["class"] = cls;
    e["representative"] = spec.group->labels()[spec.group->classes()[cls].representative];
    json reg = json::array();
    if (std::abs(mz.residue_at(0)) <= 1e-6) reg.push_back({{"z", 0.0}, {"value", to_json(regular_value_at_zero(mz))}});
    for (double z : {-0.5, 0.5}) reg.push_back({{"z", z}, {"value", to_json(mz.regular_value_at(z))}});
    e["regular_values"] = reg;
    classes.push_back(e);
    for (double t : mz.fit.t_grid) {
      const auto h = heat_trace(series, t);
      theta.add({double(cls), t, h.value.real(), h.value.imag(), h.tail_bound});
    }
    r.summary.push_back(std::to_string(cls) + "      " + e["representative"].get<std::string>() + "  " + std::to_string(d) +
                        "  s=" + std::to_string(d) + "  " + g6(mz.residue_at(d)));
  }
  r.result = {{"spectrum", spectrum_metadata(spec)}, {"operator", c.op}, {"classes", classes}};
  r.csv = std::move(theta);
}

void run_residues(Run& r) {
  const auto& c = r.cfg;
  const auto op = parse_operator(c.op, c.seed);
  static const Calibration cal = calibrate_local_residue();
  json rows = json::array();
  CsvTable csv({"element", "class", "tau_re", "tau_im", "W_re", "W_im", "d_delta"});
  r.summary.push_back("element  class  tau_g  W  |tau(D) - tau(D + D^-1)|");
  auto record = [&](std::size_t g, const std::string& label, std::size_t cls, const ResidueValue& a, const ResidueValue& b,
                    std::optional<cplx> W, std::optional<double> dbl) {
    json e{{"element", g},     {"label", label},           {"class", cls},
           {"tau_g", to_json(a)}, {"tau_g_perturbed_D", to_json(b)}, {"d_independence_delta", std::abs(a.value - b.value)}};
    e["W"] = W ? to_json(*W) : json(nullptr);
    if (dbl) e["doubling_delta"] = *dbl;
    rows.push_back(e);
    const cplx w = W.value_or(cplx(NAN, NAN));
    csv.add({double(g), double(cls), a.value.real(), a.value.imag(), w.real(), w.imag(), std::abs(a.value - b.value)});
    r.summary.push_back(label + "  " + std::to_string(cls) + "  " + g6(a.value) + "  " + (W ? g6(*W) : "n/a") + "  " +
                        g6(std::abs(a.value - b.value)));
  };
  const auto m = make_model(c, m_default(c));
  r.truncation = m.truncation;
  TauOptions topt;
  topt.fit = fit_options(c);
  if (m.circle) {
    const auto& act = *m.circle;
    const CircleSymbol sym = op.kind == OperatorSpec::symbol ? op.sym : CircleSymbol::power(op.s);
    const auto A = quantize(sym, m.truncation), A2 = quantize(sym, 2 * m.truncation);
    const auto& G = *act.group;
    for (std::size_t g = 0; g < act.elements.size(); ++g) {
      const std::size_t cls = G.class_of(g);
      if (c.cls >= 0 && std::size_t(c.cls) != cls) continue;
      const auto a = tau_g(act, g, A, DChoice::standard, topt), b = tau_g(act, g, A, DChoice::perturbed, topt);
      const double dbl = std::abs(tau_g(act, g, A2, DChoice::standard, topt).value - a.value);
      if (dbl > 1e-5)
        fail(ErrorKind::truncation_insufficient, "tau_g of " + G.labels()[g] + " moved by " + g6(dbl) + " when K doubled");
      // only the identity fixes cosphere points; every other isometry has W = 0
      const cplx W = act.elements[g].is_identity() ? local_residue_W(sym, 0, cal.C).value : cplx(0);
      record(g, G.labels()[g], cls, a, b, W, dbl);
    }
    if (op.kind == OperatorSpec::symbol) r.result["symbol"] = to_json(sym);
  } else if (m.torus) {
    require(op.kind == OperatorSpec::power, ErrorKind::invalid_parameter, "torus operators are Id or D^s");
    const auto& act = *m.torus;
    const auto T = TorusOperator::power(op.s);
    const auto& G = *act.group;
    for (std::size_t g = 0; g < act.elements.size(); ++g) {
      const std::size_t cls = G.class_of(g);
      if (c.cls >= 0 && std::size_t(c.cls) != cls) continue;
      const auto a = tau_g(act, g, T, DChoice::standard, topt.fit), b = tau_g(act, g, T, DChoice::perturbed, topt.fit);
      const auto& M = act.elements[g];
      // the local formula is implemented for the diagonal fixed circle of the swap
      std::optional<cplx> W;
      if (M.a == 0 && M.b == 1 && M.c == 1 && M.d == 0) W = local_residue_W(T, 0, cal.C).value;
      record(g, G.labels()[g], cls, a, b, W, std::nullopt);
    }
  } else {
    require(op.kind == OperatorSpec::power, ErrorKind::invalid_parameter, "sphere operators are Id or D^s");
    const auto spec = build_spectrum(m);
    for (std::size_t cls : selected_classes(c, spec.class_count())) {
      const auto a = tau_g(spec, cls, op.s, DChoice::standard, topt.fit);
      const auto b = tau_g(spec, cls, op.s, DChoice::perturbed, topt.fit);
      record(spec.group->classes()[cls].representative, spec.group->labels()[spec.group->classes()[cls].representative], cls,
             a, b, std::nullopt, std::nullopt);
    }
  }
  r.result["operator"] = c.op;
  r.result["elements"] = rows;
  r.csv = std::move(csv);
}

void run_count(Run& r) {
  const auto& c = r.cfg;
  const auto m = make_model(c, c.lmax > 0 ? std::max(8L, long(std::ceil(c.lmax)) + 1) : m_default(c));
  r.truncation = m.truncation;
  const auto spec = build_spectrum(m);
  const double lmax = c.lmax > 0 ? c.lmax : detail::spectrum_coverage(spec);
  const auto pi1 = irrep_of(spec, c.pi);
  const auto opt = fit_options(c);
  const int n = spec.manifold_dim;
  CsvTable csv({"lambda", "N_pi"});
  json res{{"spectrum", spectrum_metadata(spec)}, {"lambda_max", lmax}};
  json warnings = json::array();
  auto tauberian = [&](double s0, auto residue_fn, const CountingFunction& N) {
    try {
      res["tauberian"] = to_json(tauberian_check(s0, residue_fn(), N));
    } catch (const Error& e) {
      if (e.is_validation()) throw;
      warnings.push_back(std::string("tauberian check skipped: ") + e.what());
    }
  };
  if (c.relative.empty()) {
    const auto N = counting_function(spec, pi1, lmax, c.pi);
    for (std::size_t i = 0; i < N.size(); ++i) csv.add({N.breakpoints[i], double(N.cumulative[i])});
    try {
      const auto fit = weyl_fit(N, n, 1);
      res["fit"] = to_json(fit);
      r.summary.push_back("N_" + c.pi + "(lambda) ~ " + g6(fit.constant) + " lambda^" + std::to_string(n) + " (per dim " +
                          g6(fit.per_dimension) + ", log-log slope " + g6(fit.loglog_slope.value_or(NAN)) + ")");
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::too_few_points) throw;
      res["fit"] = nullptr;
      warnings.push_back(std::string("no Weyl fit: ") + e.what());
    }
    tauberian(double(n), [&] { return pi_zeta_residue(spec, pi1, n, opt); }, N);
    res["N_at_lambda_max"] = N(lmax);
  } else {
    const auto pi2 = irrep_of(spec, c.relative);
    const auto R = relative_counting(spec, pi1, pi2, lmax, c.pi + " - " + c.relative);
    for (std::size_t i = 0; i < R.difference.size(); ++i)
      csv.add({R.difference.breakpoints[i], double(R.difference.cumulative[i])});
    res["difference_of"] = {c.pi, c.relative};
    res["k"] = R.k;
    res["fit"] = to_json(R.fit);
    res["dominance_violations"] = R.dominance_violations;
    res["last_violation"] = R.last_violation;
    res["sign_changes"] = R.sign_changes;
    for (const auto& w : R.warnings) warnings.push_back(w);
    if (R.k >= 1)
      tauberian(double(R.k),
                [&] { return pi_zeta_residue(spec, pi1, R.k, opt) - pi_zeta_residue(spec, pi2, R.k, opt); }, R.difference);
    r.summary.push_back("N_" + c.pi + " - N_" + c.relative + " ~ " + g6(R.fit.constant) + " lambda^" + std::to_string(R.k) +
                        " (log-log slope " + g6(R.fit.loglog_slope.value_or(NAN)) + ", " +
                        std::to_string(R.sign_changes) + " sign changes)");
  }
  if (res.contains("tauberian"))
    r.summary.push_back("Tauberian slope " + g6(res["tauberian"]["slope"].get<double>()) + " vs expected " +
                        g6(res["tauberian"]["expected_slope"].get<double>()));
  for (const auto& w : warnings) r.summary.push_back("warning: " + w.get<std::string>());
  res["warnings"] = warnings;
  r.result = res;
  r.csv = std::move(csv);
}

void run_dixmier(Run& r) {
  const auto& c = r.cfg;
  require(c.terms >= 1000, ErrorKind::too_few_terms, "--terms must be at least 1000");
  // enough levels for `terms` eigenvalues of any isotypic component
  const auto probe = make_model(c, 8);
  const double G = double(group_order(probe));
  long autoK = 0;
  if (probe.circle) autoK = long(double(c.terms) * G) + 16;
  else if (probe.torus) autoK = long(1.2 * std::sqrt(double(c.terms) * G / std::numbers::pi)) + 16;
  else autoK = long(1.2 * std::sqrt(double(c.terms) * G)) + 16;
  const auto m = make_model(c, autoK);
  r.truncation = m.truncation;
  const auto spec = build_spectrum(m);
  const auto pi = irrep_of(spec, c.pi);
  const auto d = dixmier_partial(spec, pi, c.terms);
  CsvTable csv({"N", "partial_ratio"});
  for (const auto& [N, v] : d.ratios) csv.add({double(N), v});
  json ratios = json::array();
  for (const auto& [N, v] : d.ratios) ratios.push_back({N, v});
  json res = to_json(d);
  res["ratios"] = ratios;
  res["spectrum"] = spectrum_metadata(spec);
  r.result = res;
  r.csv = std::move(csv);
  r.summary.push_back("S_N / log N -> " + g6(d.limit) + " (last ratio " + g6(d.ratios.back().second) + " at N = " +
                      std::to_string(d.ratios.back().first) + ", spread " + g6(d.spread) + ")");
}

void run_stationary(Run& r) {
  const auto& c = r.cfg;
  const auto p = model_phase_problem(c.problem);
  require(c.order >= 0 && c.order <= 3, ErrorKind::invalid_parameter, "--order must be in [0, 3]");
  require(c.points >= 2, ErrorKind::too_few_points, "--points must be at least 2");
  const auto grid = geometric_grid(c.rmin, c.rmax, c.points);
  CsvTable csv({"r", "I_re", "I_im", "partial_sum_re", "partial_sum_im", "residual"});
  const cplx I(0, 1);
  json res{{"problem", c.problem}, {"n", p.n}};
  if (c.problem == "nonstationary") {
    const auto dec = nonstationary_decay(p, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto q = oscillatory_integral(p, grid[i]);
      csv.add({grid[i], q.value.real(), q.value.imag(), 0.0, 0.0, std::abs(q.value)});
    }
    res["decay"] = {{"power", 6}, {"threshold", dec.threshold}, {"holds", dec.holds}, {"magnitude", dec.magnitude}};
    r.summary.push_back(std::string("|I(r)| < r^-6 ") + (dec.holds ? "from r = " + g6(dec.threshold) : "not established"));
  } else {
    const auto fit = expansion_fit(p, grid, c.order);
    std::vector<cplx> M;
    json coeffs = json::array();
    for (int j = 0; j <= c.order; ++j) {
      M.push_back(lj_apply(p, j));
      const cplx f = fit.coefficients[std::size_t(j)];
      const double rel = std::abs(f - M.back()) / std::max(std::abs(M.back()), 1e-300);
      coeffs.push_back({{"j", j}, {"M_j", to_json(M.back())}, {"fitted", to_json(f)}, {"relative_difference", rel}});
      r.summary.push_back("M_" + std::to_string(j) + " = " + g6(M.back()) + "   fitted " + g6(f) + "   rel diff " + g6(rel));
    }
    const cplx f0 = p.f(p.x0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double rr = grid[i];
      cplx partial = 0;
      for (std::size_t j = 0; j < M.size(); ++j) partial += M[j] * std::pow(rr, -0.5 * p.n - double(j));
      partial *= std::exp(I * rr * f0);
      const cplx Ir = fit.integrals[i];
      csv.add({rr, Ir.real(), Ir.imag(), partial.real(), partial.imag(), std::abs(Ir - partial)});
    }
    res["coefficients"] = coeffs;
    res["fit_condition"] = fit.condition;
    res["remainder_exponent"] = fit.remainder_exponent;
    res["remainder_slope"] = remainder_slope(p, grid, M, fit.integrals);
    r.summary.push_back("remainder slope " + g6(res["remainder_slope"].get<double>()) + " (expected " +
                        g6(fit.remainder_exponent) + ")");
  }
  r.result = res;
  r.csv = std::move(csv);
}

void run_spectrum(Run& r) {
  const auto m = make_model(r.cfg, m_default(r.cfg));
  r.truncation = m.truncation;
  const auto spec = build_spectrum(m);
  r.result = spectrum_metadata(spec);
  r.csv = spectrum_table(spec);
  r.summary.push_back(std::to_string(spec.levels.size()) + " levels, kernel dimension " + std::to_string(spec.kernel.dim));
}

int run_selftest(const Config& c) {
  const auto res = acceptance::run_all(c.seed, std::cout, c.only);
  int failed = 0;
  json rows = json::array();
  for (const auto& r : res) {
    failed += !r.pass;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  std::cout << res.size() - failed << "/" << res.size() << " passed" << std::endl;
  if (!c.out.empty()) save_json(json{{"seed", c.seed}, {"criteria", rows}}, c.out + ".json");
  return failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivariant residues, twisted zeta functions and counting asymptotics on model manifolds"};
  app.set_config("--config", "", "INI file; keys in a section named after the subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();
  Config c;

  auto model_opts = [&c](CLI::App* s) {
    s->add_option("--model", c.model, "circle | torus | sphere")->check(CLI::IsMember({"circle", "torus", "sphere"}));
    s->add_option("--group", c.group, "cyclic:N[:step] | dihedral:N | reflection (circle, sphere)");
    s->add_option("--action", c.action, "torus action: swap, negation, flip, quarter-turn, hex-rotation, identity or a,b,c,d");
    s->add_option("--Kmax", c.Kmax, "frequency truncation (circle, torus)")->check(CLI::PositiveNumber);
    s->add_option("--Lmax", c.Lmax, "degree truncation (sphere)")->check(CLI::PositiveNumber);
    s->add_option("--tol", c.tol, "heat-trace fit residual tolerance")->check(CLI::PositiveNumber);
  };
  auto io_opts = [&c](CLI::App* s) {
    s->add_option("--out", c.out, "output prefix; writes PREFIX.json and PREFIX.csv");
    s->add_option("--seed", c.seed, "seed for random symbols");
  };

  auto* zeta = app.add_subcommand("zeta", "poles, residues and regular values of twisted zeta functions");
  model_opts(zeta);
  io_opts(zeta);
  zeta->add_option("--operator", c.op, "Id | D^s");
  zeta->add_option("--class", c.cls, "conjugacy class index (default: all)")->check(CLI::NonNegativeNumber);

  auto* residues = app.add_subcommand("residues", "equivariant residues tau_g against the local formula W");
  model_opts(residues);
  io_opts(residues);
  residues->add_option("--operator", c.op, "Id | D^s | symbol:PATH | random:ORDER (symbols on the circle)");
  residues->add_option("--class", c.cls, "conjugacy class index (default: all)")->check(CLI::NonNegativeNumber);

  auto* count = app.add_subcommand("count", "equivariant eigenvalue counting and Weyl asymptotics");
  model_opts(count);
  io_opts(count);
  count->add_option("--pi", c.pi, "irrep name")->required();
  count->add_option("--relative", c.relative, "second irrep; counts N_pi - N_relative");
  count->add_option("--lmax", c.lmax, "largest eigenvalue counted")->check(CLI::PositiveNumber);

  auto* dix = app.add_subcommand("dixmier", "Dixmier partial ratios of D^-1 on an isotypic component");
  model_opts(dix);
  io_opts(dix);
  dix->add_option("--pi", c.pi, "irrep name")->required();
  dix->add_option("--terms", c.terms, "number of eigenvalues summed")->check(CLI::PositiveNumber);

  auto* sp = app.add_subcommand("stationary-phase", "stationary-phase coefficients against oscillatory quadrature");
  io_opts(sp);
  sp->add_option("--problem", c.problem, "gaussian | cubic | cubic-fd | nonstationary | gaussian-2d");
  sp->add_option("--order", c.order, "highest coefficient index J");
  sp->add_option("--rmin", c.rmin)->check(CLI::PositiveNumber);
  sp->add_option("--rmax", c.rmax)->check(CLI::PositiveNumber);
  sp->add_option("--points", c.points, "radii on the geometric grid");

  auto* spec = app.add_subcommand("spectrum", "export levels and class characters");
  model_opts(spec);
  io_opts(spec);

  auto* self = app.add_subcommand("selftest", "run the acceptance checks");
  self->add_option("--seed", c.seed, "seed for the randomized checks");
  self->add_option("--only", c.only, "criterion ids");
  self->add_option("--out", c.out, "writes PREFIX.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (self->parsed()) return run_selftest(c);
    CLI::App* sub = app.get_subcommands().front();
    Run r{c, sub->get_name(), json::object(), std::nullopt, {}, 0};
    if (sub == zeta) run_zeta(r);
    else if (sub == residues) run_residues(r);
    else if (sub == count) run_count(r);
    else if (sub == dix) run_dixmier(r);
    else if (sub == sp) run_stationary(r);
    else run_spectrum(r);
    emit(r);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return e.is_validation() ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
}
