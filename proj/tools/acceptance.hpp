#pragma once

// The fourteen acceptance checks. Each returns pass/fail with a one-line
// summary of the measured quantities against their closed-form oracles.

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eqres/asymptotics.hpp"
#include "eqres/io.hpp"
#include "eqres/residue.hpp"
#include "eqres/stationary_phase.hpp"
#include "eqres/zeta.hpp"

namespace eqres::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome(unsigned seed)> run;
};

struct Result {
  int id;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

namespace detail {

inline std::string g(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

inline double max_residue(const EquivariantSpectrum& s, std::size_t c) {
  const auto mz = meromorphic_continue_checked(s.series(c), s.fixed.classes[c].pole_dim());
  double m = 0;
  for (const auto& p : mz.poles) m = std::max(m, std::abs(p.residue));
  return m;
}

}  // namespace detail

inline std::vector<Criterion> criteria() {
  using detail::g;
  using std::numbers::pi;
  using std::numbers::sqrt2;
  std::vector<Criterion> v;

  v.push_back({1, "circle identity residue", [](unsigned) {
    const auto s = circle_spectrum(circle_rotation_action(1), 512);
    const cplx r = meromorphic_continue_checked(s.series(0), 1).residue_at(1);
    const double err = std::abs(r - cplx(2));
    return Outcome{err < 1e-6, "res_{z=1} = " + fmt17(r.real()) + ", |err| = " + g(err) + " (tol 1e-6)"};
  }});

  v.push_back({2, "torus swap residue", [](unsigned) {
    const auto s = torus_spectrum(torus_named_action("swap"), 400);
    const auto c = s.group->class_of(1);
    ContinuationOptions opt;
    opt.bogus_exponent = true;
    const auto mz = meromorphic_continue_checked(s.series(c), s.fixed.classes[c].pole_dim(), opt);
    const double err = std::abs(mz.residue_at(1) - cplx(sqrt2));
    const double bogus = std::abs(*mz.fit.bogus_coefficient) / mz.fit.leading_scale;
    const bool ok = err < 1e-4 && s.fixed.classes[c].k_g == 1 && mz.d == 1 && bogus < 1e-6;
    return Outcome{ok, "res_{z=1} = " + fmt17(mz.residue_at(1).real()) + ", |err| = " + g(err) +
                           " (tol 1e-4); k_g = " + std::to_string(s.fixed.classes[c].k_g) + ", t^-2 coefficient " + g(bogus) +
                           " of leading"};
  }});

  v.push_back({3, "empty-cosphere vanishing", [](unsigned) {
    double worst = 0;
    const auto circ = circle_spectrum(circle_rotation_action(5), 512);
    for (std::size_t c = 1; c < 5; ++c) worst = std::max(worst, detail::max_residue(circ, c));
    const auto neg = torus_spectrum(torus_named_action("negation"), 100);
    worst = std::max(worst, detail::max_residue(neg, 1));
    const auto sph = sphere_spectrum(sphere_rotation_action(2), 100);
    worst = std::max(worst, detail::max_residue(sph, 1));
    const auto sph3 = sphere_spectrum(sphere_rotation_action(3), 100);
    for (std::size_t c = 1; c < 3; ++c) worst = std::max(worst, detail::max_residue(sph3, c));
    return Outcome{worst < 1e-6, "largest residue over circle Z/5, torus negation, sphere Z/2 and Z/3 rotations: " + g(worst) +
                                     " (tol 1e-6)"};
  }});

  v.push_back({4, "pole-lattice conformance", [](unsigned) {
    std::vector<EquivariantSpectrum> specs{
        circle_spectrum(circle_dihedral_action(3), 256),        circle_spectrum(circle_rotation_action(4), 256),
        circle_spectrum(circle_reflection_action(), 256),       torus_spectrum(torus_named_action("swap"), 100),
        torus_spectrum(torus_named_action("negation"), 100),    torus_spectrum(torus_named_action("quarter-turn"), 100),
        torus_spectrum(torus_named_action("identity"), 100),    sphere_spectrum(sphere_rotation_action(4), 100),
        sphere_spectrum(sphere_reflection_action(), 100)};
    ContinuationOptions opt;
    opt.bogus_exponent = true;
    double worst = 0;
    int n = 0;
    for (const auto& s : specs)
      for (std::size_t c = 0; c < s.class_count(); ++c) {
        const auto mz = meromorphic_continue_checked(s.series(c), s.fixed.classes[c].pole_dim(), opt);
        worst = std::max(worst, std::abs(*mz.fit.bogus_coefficient) / mz.fit.leading_scale);
        ++n;
      }
    return Outcome{worst < 1e-6, std::to_string(n) + " classes; largest bogus/leading ratio " + g(worst) + " (tol 1e-6)"};
  }});

  v.push_back({5, "stationary phase", [](unsigned) {
    const cplx M0 = std::sqrt(2 * pi) * std::polar(1.0, pi / 4);
    const auto gp = model_phase_problem("gaussian");
    const double e_lj = detail::rel(lj_apply(gp, 0), M0);
    const auto fit0 = expansion_fit(gp, geometric_grid(1e3, 1e5, 8), 0);
    const double e_fit = detail::rel(fit0.coefficients[0], M0);
    const auto cp = model_phase_problem("cubic-fd");
    const auto fit1 = expansion_fit(cp, geometric_grid(3e4, 3e6, 10), 2);
    const double e1 = detail::rel(fit1.coefficients[1], lj_apply(cp, 1));
    const auto dec = nonstationary_decay(model_phase_problem("nonstationary"), geometric_grid(10, 1e4, 13));
    const bool ok = e_lj < 1e-6 && e_fit < 1e-6 && e1 < 1e-4 && dec.holds;
    return Outcome{ok, "M0 rel err lj " + g(e_lj) + ", fit " + g(e_fit) + " (tol 1e-6); cubic M1 fit vs lj " + g(e1) +
                           " (tol 1e-4); |I| < r^-6 from r = " + g(dec.threshold) + (dec.holds ? "" : " [not established]")};
  }});

  v.push_back({6, "local formula vs spectral residue", [](unsigned) {
    const auto cal = calibrate_local_residue();
    const TorusOperator B{{{-1, {{{0, 0}, 1.0}, {{1, -1}, 0.5}, {{-1, 1}, 0.5}}}}};
    const cplx W = local_residue_W(B, 0, cal.C).value;
    const cplx tau = tau_g(torus_named_action("swap"), 1, B).value;
    const double e2 = std::abs(W - tau);
    const cplx Wc = local_residue_W(CircleSymbol::power(-1), 0, cal.C).value;
    const double ec = std::abs(Wc - cplx(2));
    const bool ok = e2 < 1e-3 && ec < 1e-3;
    return Outcome{ok, "C = " + fmt17(cal.C) + "; second symbol W = " + fmt17(W.real()) + ", tau = " + fmt17(tau.real()) +
                           ", |diff| = " + g(e2) + " (tol 1e-3); circle W(D^-1) err " + g(ec)};
  }});

  v.push_back({7, "trace property", [](unsigned seed) {
    std::mt19937 rng(seed);
    const auto act = circle_dihedral_action(3);
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
      double sx = 0, sy = 0;
      const auto X = random_element(rng, act, 512, sx);
      const auto Y = random_element(rng, act, 512, sy);
      const auto C = commutator(X, Y);
      for (std::size_t c = 0; c < act.group->class_count(); ++c)
        worst = std::max(worst, std::abs(trace_on_class(C, c)) / std::max(1.0, sx * sy));
    }
    return Outcome{worst < 1e-6, "50 commutators in A(S^1) x D_3 at K = 512, seed " + std::to_string(seed) +
                                     ": worst relative class trace " + g(worst) + " (tol 1e-6)"};
  }});

  v.push_back({8, "D-independence", [](unsigned seed) {
    std::mt19937 rng(seed);
    const auto act = circle_dihedral_action(3);
    double worst = 0;
    auto check = [&](std::size_t g, const QuantizedOperator& A) {
      const cplx a = tau_g(act, g, A).value, b = tau_g(act, g, A, DChoice::perturbed).value;
      if (std::abs(a) > 1e-6) worst = std::max(worst, std::abs(a - b));
    };
    check(0, quantize(CircleSymbol::power(-1), 512));
    for (int i = 0; i < 3; ++i) check(0, quantize(random_symbol(rng, -1, 2), 512));
    check(0, quantize(random_symbol(rng, 0, 2), 512));
    check(3, quantize(CircleSymbol::power(-1), 512));  // a reflection: residue 0 on both
    const auto sw = torus_named_action("swap");
    for (const auto& op : {TorusOperator::power(-1), TorusOperator{{{-1, {{{0, 0}, 1.0}, {{1, -1}, 0.5}, {{-1, 1}, 0.5}}}}}}) {
      const cplx a = tau_g(sw, 1, op).value, b = tau_g(sw, 1, op, DChoice::perturbed).value;
      worst = std::max(worst, std::abs(a - b));
    }
    return Outcome{worst < 1e-5, "largest |tau(D) - tau(D + D^-1)| " + g(worst) + " (tol 1e-5)"};
  }});

  v.push_back({9, "equivariant Weyl", [](unsigned) {
    const auto t = torus_spectrum(torus_named_action("swap"), 200);
    const auto ft = weyl_fit(counting_function(t, "trivial", 200), 2, 1);
    const auto fs = weyl_fit(counting_function(t, "sign", 200), 2, 1);
    const double dt = std::abs(ft.per_dimension - fs.per_dimension) / ft.per_dimension;
    const auto c = circle_spectrum(circle_reflection_action(), 1000);
    const auto ct = weyl_fit(counting_function(c, "trivial", 1000), 1, 1);
    const auto cs = weyl_fit(counting_function(c, "sign", 1000), 1, 1);
    const double ec = std::max(std::abs(ct.constant - 1), std::abs(cs.constant - 1));
    return Outcome{dt < 0.02 && ec < 0.01, "torus swap C_trivial = " + g(ft.per_dimension) + ", C_sign = " + g(fs.per_dimension) +
                                               ", rel diff " + g(dt) + " (tol 0.02); circle D_1 constants " + g(ct.constant) +
                                               ", " + g(cs.constant) + " (tol 0.01)"};
  }});

  v.push_back({10, "Tauberian / residue consistency", [](unsigned) {
    const auto s = torus_spectrum(torus_named_action("swap"), 200);
    const auto R = relative_counting(s, "trivial", "sign", 200);
    const auto rep = tauberian_check(1.0, sqrt2, R.difference);
    return Outcome{rep.deviation < 0.02, "difference slope " + g(rep.slope) + " vs sqrt2, rel dev " + g(rep.deviation) + " (tol 0.02)"};
  }});

  v.push_back({11, "relative asymptotics exponent", [](unsigned) {
    const auto s = torus_spectrum(torus_named_action("swap"), 200);
    const auto R = relative_counting(s, "trivial", "sign", 200);
    const double slope = R.fit.loglog_slope.value_or(NAN);
    const bool ok = R.k == 1 && std::abs(slope - 1) <= 0.05;
    return Outcome{ok, "k = " + std::to_string(R.k) + ", log-log slope " + g(slope) + " (1 +- 0.05)"};
  }});

  v.push_back({12, "regular values at isolated fixed points", [](unsigned) {
    const auto c = circle_spectrum(circle_reflection_action(), 256);
    double eth = 0;
    for (double t : {1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0}) eth = std::max(eth, std::abs(heat_trace(c, 1, t).value - cplx(1)));
    const cplx z0 = regular_value_at_zero(meromorphic_continue_checked(c.series(1), 0));
    const double ez = std::abs(z0 - cplx(1));
    const auto s = sphere_spectrum(sphere_rotation_action(2), 256);
    double es = 0;
    for (double t : {1e-3, 1e-2, 0.1, 1.0}) {
      const double exact = std::exp(-t / 2) / (1 + std::exp(-t));
      es = std::max(es, std::abs(heat_trace(s, 1, t).value - cplx(exact)));
    }
    const double elim = std::abs(heat_trace(s, 1, 1e-4).value - cplx(0.5));
    const bool ok = eth < 1e-10 && ez < 1e-6 && es < 1e-4 && elim < 1e-4;
    return Outcome{ok, "circle reflection |Theta - 1| " + g(eth) + " (tol 1e-10), |zeta(0) - 1| " + g(ez) +
                           " (tol 1e-6); sphere half-turn |Theta - closed form| " + g(es) + ", |Theta(1e-4) - 1/2| " + g(elim) +
                           " (tol 1e-4)"};
  }});

  v.push_back({13, "Dixmier ratios", [](unsigned) {
    const auto s = circle_spectrum(circle_rotation_action(1), 500000);
    const auto t = character_table(s.group);
    const auto a = dixmier_partial(s, t.irreps[0], 1000000);
    const auto r = circle_spectrum(circle_reflection_action(), 1000000);
    const auto rt = character_table(r.group);
    const auto b = dixmier_partial(r, rt.irreps[rt.find("trivial")], 1000000);
    const double ea = std::abs(a.limit - 2) / 2, eb = std::abs(b.limit - 1);
    const bool ok = ea < 0.02 && eb < 0.02 && a.spread < 0.03 && b.spread < 0.03;
    return Outcome{ok, "circle D^-1 limit " + g(a.limit) + " (rel err " + g(ea) + "), D_1 trivial limit " + g(b.limit) +
                           " (rel err " + g(eb) + "), tol 0.02; spreads " + g(a.spread) + ", " + g(b.spread)};
  }});

  v.push_back({14, "property suites", [](unsigned) {
    double orth = 0;
    for (int N : {1, 2, 3, 4, 5, 6, 8, 12}) orth = std::max(orth, orthogonality_error(character_table(make_cyclic(N))));
    for (int N : {2, 3, 4, 5, 6, 8, 12}) orth = std::max(orth, orthogonality_error(character_table(make_dihedral(N))));
    std::vector<EquivariantSpectrum> specs{circle_spectrum(circle_dihedral_action(4), 400),
                                           torus_spectrum(torus_named_action("swap"), 60),
                                           torus_spectrum(torus_named_action("quarter-turn"), 60),
                                           sphere_spectrum(sphere_rotation_action(3), 60),
                                           sphere_spectrum(sphere_reflection_action(), 60)};
    double integ = 0;
    long defect = 0;
    for (const auto& s : specs) {
      const auto t = character_table(s.group);
      for (const auto& l : s.levels)
        for (const auto& pi : t.irreps) {
          const cplx m = multiplicity(l.chi, pi, *s.group);
          integ = std::max(integ, std::max(std::abs(m.imag()), std::abs(m.real() - std::round(m.real()))));
        }
      defect = std::max(defect, decomposition_defect(s, double(s.truncation)));
    }
    // doubling stability of the reported residues
    double dbl = 0;
    const auto c1 = circle_spectrum(circle_rotation_action(1), 512), c2 = circle_spectrum(circle_rotation_action(1), 1024);
    dbl = std::max(dbl, std::abs(meromorphic_continue_checked(c1.series(0), 1).residue_at(1) -
                                 meromorphic_continue_checked(c2.series(0), 1).residue_at(1)));
    const auto t1 = torus_spectrum(torus_named_action("swap"), 400), t2 = torus_spectrum(torus_named_action("swap"), 800);
    dbl = std::max(dbl, std::abs(meromorphic_continue_checked(t1.series(1), 1).residue_at(1) -
                                 meromorphic_continue_checked(t2.series(1), 1).residue_at(1)));
    const auto act = circle_dihedral_action(3);
    for (std::size_t g0 : {0, 3}) {
      auto build = [](long K) { return quantize(CircleSymbol::power(-1), K); };
      const auto a = tau_g(act, g0, build(512)), b = tau_g(act, g0, build(1024));
      dbl = std::max(dbl, std::abs(a.value - b.value));
    }
    std::mt19937 rng(5);
    const auto sym = random_symbol(rng, 0, 3);
    dbl = std::max(dbl, std::abs(tau_g(act, 0, quantize(sym, 512)).value - tau_g(act, 0, quantize(sym, 1024)).value));
    const bool ok = orth < 1e-12 && integ < 1e-9 && defect == 0 && dbl < 1e-5;
    return Outcome{ok, "orthogonality " + g(orth) + " (1e-12), integrality " + g(integ) + " (1e-9), decomposition defect " +
                           std::to_string(defect) + ", doubling " + g(dbl) + " (1e-5)"};
  }});

  return v;
}

/// Runs every criterion, printing one line each; errors count as failures.
inline std::vector<Result> run_all(unsigned seed, std::ostream& os, const std::vector<int>& only = {}) {
  std::vector<Result> out;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(seed);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back({c.id, c.name, o.pass, o.detail, sec});
    char head[96];
    std::snprintf(head, sizeof head, "%s %2d  %-40s %7.2fs  ", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), sec);
    os << head << o.detail << std::endl;
  }
  return out;
}

}  // namespace eqres::acceptance
