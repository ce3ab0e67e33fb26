#pragma once

// Counting functions N_pi(lambda) = sum_{lambda_i <= lambda} <V_i, pi>, imposed-exponent
// Weyl fits, relative counting N_pi1 - N_pi2, the Tauberian comparison with zeta
// residues, and pi-restricted Dixmier ratios S_N / log N for D^{-n}.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqres/group.hpp"
#include "eqres/spectral.hpp"
#include "eqres/zeta.hpp"

namespace eqres {

struct CountingFunction {
  std::vector<double> breakpoints;  // sorted eigenvalues; 0 is the kernel
  std::vector<long> cumulative;     // value at and right of each breakpoint
  std::string label;
  int pi_dim = 1;
  double coverage = 0;  // exact up to here

  long operator()(double lambda) const {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), lambda);
    if (it == breakpoints.begin()) return 0;
    return cumulative[static_cast<std::size_t>(it - breakpoints.begin() - 1)];
  }
  std::size_t size() const { return breakpoints.size(); }
  bool nondecreasing() const {
    for (std::size_t i = 1; i < cumulative.size(); ++i)
      if (cumulative[i] < cumulative[i - 1]) return false;
    return true;
  }
};

struct AsymptoticFit {
  double exponent = 0;
  double constant = 0;     // tail average of N / lambda^exponent
  double per_dimension = 0;  // constant / dim(pi)
  std::pair<double, double> window{0, 0};
  std::vector<std::pair<double, double>> convergence_series;  // (lambda, N / lambda^exponent)
  double spread = 0;  // (max - min) / |mean| over the window; absolute when the mean is 0
  std::optional<double> loglog_slope;
};

namespace detail {

inline double spectrum_coverage(const EquivariantSpectrum& spec) {
  return spec.levels.empty() ? 0.0 : std::max(spec.levels.back().lambda, double(spec.truncation));
}

inline long level_multiplicity(const ClassFunction& chi, const ClassFunction& pi, const FiniteGroup& G, double lambda) {
  const cplx m = multiplicity(chi, pi, G);
  const auto r = round_multiplicity(m);
  if (!r || *r < 0)
    fail(ErrorKind::character_inconsistency, "multiplicity " + std::to_string(m.real()) + "+" + std::to_string(m.imag()) +
                                                 "i at lambda = " + std::to_string(lambda));
  return *r;
}

/// lambda_max / 10 .. lambda_max, geometric.
inline std::vector<double> last_decade(double lambda_max, int points = 201) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(lambda_max * std::pow(10.0, -1.0 + double(i) / (points - 1)));
  g.back() = lambda_max;
  return g;
}

inline double relative_spread(const std::vector<std::pair<double, double>>& s, double mean) {
  double lo = s.front().second, hi = lo;
  for (const auto& [x, y] : s) lo = std::min(lo, y), hi = std::max(hi, y);
  return mean != 0 ? (hi - lo) / std::abs(mean) : hi - lo;
}

inline std::optional<double> loglog_slope(const CountingFunction& N, const std::vector<double>& grid) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double l : grid) {
    const long v = N(l);
    if (v == 0) continue;
    const double x = std::log(l), y = std::log(std::abs(double(v)));
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
  }
  if (n < 2) return std::nullopt;
  const double den = n * sxx - sx * sx;
  if (den <= 0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

}  // namespace detail

/// N_pi on [0, lambda_max]. The kernel enters at lambda = 0.
inline CountingFunction counting_function(const EquivariantSpectrum& spec, const ClassFunction& pi, double lambda_max,
                                          const std::string& label = "pi") {
  const double cov = detail::spectrum_coverage(spec);
  require(lambda_max > 0, ErrorKind::invalid_parameter, "lambda_max must be positive");
  require(lambda_max <= cov * (1 + 1e-12), ErrorKind::truncation_too_small,
          "lambda_max " + std::to_string(lambda_max) + " beyond spectrum coverage " + std::to_string(cov));
  const auto& G = *spec.group;
  CountingFunction N;
  N.label = label;
  N.pi_dim = static_cast<int>(std::lround(pi[G.identity_class()].real()));
  N.coverage = lambda_max;
  long acc = 0;
  if (spec.kernel.dim > 0) {
    acc += detail::level_multiplicity(spec.kernel.chi, pi, G, 0.0);
    N.breakpoints.push_back(0.0);
    N.cumulative.push_back(acc);
  }
  for (const auto& l : spec.levels) {
    if (l.lambda > lambda_max) break;
    acc += detail::level_multiplicity(l.chi, pi, G, l.lambda);
    N.breakpoints.push_back(l.lambda);
    N.cumulative.push_back(acc);
  }
  return N;
}

inline CountingFunction counting_function(const EquivariantSpectrum& spec, const std::string& irrep, double lambda_max) {
  const auto table = character_table(spec.group);
  return counting_function(spec, table.irreps[table.find(irrep)], lambda_max, irrep);
}

/// Total eigenvalue count (with dimension) on [0, lambda_max].
inline CountingFunction total_counting(const EquivariantSpectrum& spec, double lambda_max) {
  CountingFunction N;
  N.label = "total";
  N.coverage = lambda_max;
  long acc = 0;
  if (spec.kernel.dim > 0) {
    acc += spec.kernel.dim;
    N.breakpoints.push_back(0.0);
    N.cumulative.push_back(acc);
  }
  for (const auto& l : spec.levels) {
    if (l.lambda > lambda_max) break;
    acc += l.dim;
    N.breakpoints.push_back(l.lambda);
    N.cumulative.push_back(acc);
  }
  return N;
}

/// max over breakpoints of |sum_pi dim(pi) N_pi - N|; 0 when the decomposition is exact.
inline long decomposition_defect(const EquivariantSpectrum& spec, double lambda_max) {
  const auto table = character_table(spec.group);
  const auto total = total_counting(spec, lambda_max);
  std::vector<CountingFunction> parts;
  for (std::size_t i = 0; i < table.size(); ++i) parts.push_back(counting_function(spec, table.irreps[i], lambda_max));
  long worst = 0;
  for (std::size_t b = 0; b < total.size(); ++b) {
    long s = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) s += long(table.dims[i]) * parts[i].cumulative[b];
    worst = std::max(worst, std::abs(s - total.cumulative[b]));
  }
  return worst;
}

/// Imposes N ~ C lambda^p and averages N / lambda^p over the last decade of the window.
inline AsymptoticFit fit_exponent(const CountingFunction& N, double p) {
  AsymptoticFit f;
  f.exponent = p;
  const auto grid = detail::last_decade(N.coverage);
  f.window = {grid.front(), grid.back()};
  double sum = 0;
  for (double l : grid) {
    const double r = double(N(l)) / std::pow(l, p);
    f.convergence_series.push_back({l, r});
    sum += r;
  }
  f.constant = sum / double(grid.size());
  f.per_dimension = N.pi_dim != 0 ? f.constant / N.pi_dim : f.constant;
  f.spread = detail::relative_spread(f.convergence_series, f.constant);
  f.loglog_slope = detail::loglog_slope(N, grid);
  return f;
}

/// Weyl fit with the exponent n/m imposed.
inline AsymptoticFit weyl_fit(const CountingFunction& N, int n, double m) {
  require(m > 0 && n > 0, ErrorKind::invalid_parameter, "weyl_fit needs n > 0 and m > 0");
  require(N.size() >= 100, ErrorKind::too_few_points, "weyl_fit needs at least 100 breakpoints, got " + std::to_string(N.size()));
  return fit_exponent(N, double(n) / m);
}

struct RelativeCounting {
  CountingFunction difference;  // N_pi1 - N_pi2
  AsymptoticFit fit;
  int k = -1;                   // max dim M^g over classes where the characters differ; -1 if none
  long dominance_violations = 0;  // levels with <V, pi1> < <V, pi2>
  double last_violation = 0;
  long sign_changes = 0;
  std::vector<std::string> warnings;
};

/// For k < 0 (the characters only differ on classes without fixed points) the fit uses lambda^eps, eps = 0.1.
inline RelativeCounting relative_counting(const EquivariantSpectrum& spec, const ClassFunction& pi1, const ClassFunction& pi2,
                                          double lambda_max, const std::string& label = "pi1-pi2") {
  const auto& G = *spec.group;
  const auto N1 = counting_function(spec, pi1, lambda_max), N2 = counting_function(spec, pi2, lambda_max);
  RelativeCounting R;
  if (N1.pi_dim != N2.pi_dim)
    R.warnings.push_back(std::string(to_string(ErrorKind::hypothesis_violation)) + ": dim(pi1) = " + std::to_string(N1.pi_dim) +
                         " differs from dim(pi2) = " + std::to_string(N2.pi_dim));
  for (std::size_t c = 0; c < G.class_count(); ++c)
    if (std::abs(pi1[c] - pi2[c]) > 1e-12) R.k = std::max(R.k, spec.fixed.classes[c].k_g);

  CountingFunction& D = R.difference;
  D.label = label;
  D.coverage = lambda_max;
  D.pi_dim = 1;
  D.breakpoints = N1.breakpoints;
  long prev_sign = 0;
  for (std::size_t b = 0; b < N1.size(); ++b) {
    const long v = N1.cumulative[b] - N2.cumulative[b];
    D.cumulative.push_back(v);
    const long jump = v - (b ? D.cumulative[b - 1] : 0);
    if (jump < 0) {
      ++R.dominance_violations;
      R.last_violation = D.breakpoints[b];
    }
    const long sg = (v > 0) - (v < 0);
    if (sg != 0 && prev_sign != 0 && sg != prev_sign) ++R.sign_changes;
    if (sg != 0) prev_sign = sg;
  }
  if (R.dominance_violations > 0)
    R.warnings.push_back("dominance <V, pi1> >= <V, pi2> fails at " + std::to_string(R.dominance_violations) +
                         " levels, last at lambda = " + std::to_string(R.last_violation));
  R.fit = fit_exponent(D, R.k >= 0 ? double(R.k) : 0.1);
  return R;
}

inline RelativeCounting relative_counting(const EquivariantSpectrum& spec, const std::string& pi1, const std::string& pi2,
                                          double lambda_max) {
  const auto t = character_table(spec.group);
  return relative_counting(spec, t.irreps[t.find(pi1)], t.irreps[t.find(pi2)], lambda_max, pi1 + "-" + pi2);
}

/// Residue at z = s of zeta_pi(z) = sum_i <V_i, pi> lambda_i^{-z}, assembled from the class zetas.
inline cplx pi_zeta_residue(const EquivariantSpectrum& spec, const ClassFunction& pi, double s,
                            const ContinuationOptions& opt = {}) {
  const auto& G = *spec.group;
  cplx acc = 0;
  for (std::size_t c = 0; c < G.class_count(); ++c) {
    const int d = spec.fixed.classes[c].pole_dim();
    if (s > d || pi[c] == cplx(0)) continue;
    const auto mz = meromorphic_continue_checked(spec.series(c), d, opt);
    acc += double(G.classes()[c].size()) * std::conj(pi[c]) * mz.residue_at(s);
  }
  return acc / double(G.order());
}

struct TauberianReport {
  double s0 = 1;
  cplx residue = 0;
  double expected_slope = 0;  // Re(residue) / s0
  double slope = 0;           // last-decade secant of v(x), x = lambda^s0
  double deviation = 0;       // relative to expected_slope, absolute when it is 0
  bool monotone = true;
  bool vanishes_below_one = true;
  std::vector<std::pair<double, double>> ratio_series;  // (x, v(x) / x)
};

/// v(x) = N(x^{1/s0}) - N(0), x = lambda^s0. A simple pole at s0 with residue A gives v(x)/x -> A/s0.
inline TauberianReport tauberian_check(double s0, cplx residue, const CountingFunction& N) {
  require(s0 > 0, ErrorKind::invalid_parameter, "leading pole must be positive");
  TauberianReport r;
  r.s0 = s0;
  r.residue = residue;
  r.expected_slope = residue.real() / s0;
  const long base = N(0.0);
  auto v = [&](double x) { return double(N(std::pow(x, 1.0 / s0)) - base); };
  r.monotone = N.nondecreasing();
  r.vanishes_below_one = v(std::nextafter(1.0, 0.0)) == 0;
  const double xmax = std::pow(N.coverage, s0);
  for (double x : detail::last_decade(xmax)) r.ratio_series.push_back({x, v(x) / x});
  r.slope = (v(xmax) - v(xmax / 10)) / (0.9 * xmax);
  r.deviation = r.expected_slope != 0 ? std::abs(r.slope - r.expected_slope) / std::abs(r.expected_slope)
                                      : std::abs(r.slope);
  return r;
}

struct DixmierResult {
  std::vector<std::pair<long, double>> ratios;  // (N, S_N / log N)
  double limit = 0;        // Richardson extrapolation in 1/log N
  double spread = 0;       // last-decade (max - min) / |limit|; absolute when the limit is 0
  long terms = 0;
};

/// S_N / log N for a nonincreasing sequence mu on the grid 10^3 * 10^{i/per_decade} up to N_terms.
inline DixmierResult dixmier_partial(const std::vector<double>& mu, long N_terms, int per_decade = 4) {
  require(N_terms >= 1000, ErrorKind::too_few_terms, "Dixmier ratios need at least 1000 terms");
  require(static_cast<long>(mu.size()) >= N_terms, ErrorKind::truncation_too_small,
          "sequence has " + std::to_string(mu.size()) + " terms, " + std::to_string(N_terms) + " requested");
  DixmierResult r;
  r.terms = N_terms;
  std::vector<long> grid;
  for (int i = 0;; ++i) {
    const auto n = static_cast<long>(std::llround(1000.0 * std::pow(10.0, double(i) / per_decade)));
    if (n >= N_terms) break;
    grid.push_back(n);
  }
  grid.push_back(N_terms);
  long double S = 0;
  std::size_t gi = 0;
  for (long j = 0; j < N_terms && gi < grid.size(); ++j) {
    S += mu[static_cast<std::size_t>(j)];
    if (j + 1 == grid[gi]) {
      r.ratios.push_back({grid[gi], double(S / std::log(static_cast<long double>(grid[gi])))});
      ++gi;
    }
  }
  // ratio = L + a / log N: least squares over the grid
  double su = 0, sy = 0, suu = 0, suy = 0;
  const double n = double(r.ratios.size());
  for (const auto& [N, y] : r.ratios) {
    const double u = 1.0 / std::log(double(N));
    su += u, sy += y, suu += u * u, suy += u * y;
  }
  const double den = n * suu - su * su;
  r.limit = den > 0 ? (suu * sy - su * suy) / den : sy / n;
  std::vector<std::pair<double, double>> tail;
  for (const auto& [N, y] : r.ratios)
    if (N * 10 >= N_terms) tail.push_back({double(N), y});
  r.spread = detail::relative_spread(tail, r.limit);
  return r;
}

/// Eigenvalues of D^{-n} (n = manifold dimension) repeated with their pi-multiplicity, kernel excluded.
inline std::vector<double> dixmier_sequence(const EquivariantSpectrum& spec, const ClassFunction& pi, long N_terms) {
  const auto& G = *spec.group;
  const double n = spec.manifold_dim;
  std::vector<double> mu;
  bool any = false;
  for (const auto& l : spec.levels) {
    if (static_cast<long>(mu.size()) >= N_terms) break;
    const long m = detail::level_multiplicity(l.chi, pi, G, l.lambda);
    any = any || m > 0;
    const double v = std::pow(l.lambda, -n);
    for (long i = 0; i < m; ++i) mu.push_back(v);
  }
  // pi never occurs: D^{-n} restricted to it is the zero operator
  if (!any) mu.assign(static_cast<std::size_t>(N_terms), 0.0);
  return mu;
}

inline DixmierResult dixmier_partial(const EquivariantSpectrum& spec, const ClassFunction& pi, long N_terms) {
  return dixmier_partial(dixmier_sequence(spec, pi, N_terms), N_terms);
}

}  // namespace eqres
