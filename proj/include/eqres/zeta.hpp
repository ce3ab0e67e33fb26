#pragma once

// Twisted zeta functions  zeta(z) = sum_i w_i lambda_i^{-z}  of a spectral
// series: direct evaluation in the half-plane of convergence, and meromorphic
// continuation through the heat trace
//
//   Gamma(z) zeta(z) = int_0^inf t^{z-1} Theta(t) dt,   Theta(t) = sum_i w_i e^{-t lambda_i}.
//
// A term c t^{-s} (s > 0) in the small-t expansion of Theta produces a simple
// pole of zeta at z = s with residue c / Gamma(s). At s = -k <= 0 the Gamma
// pole doubles up, so a residue R of zeta there appears as the term
// -R (-1)^k / k! * t^k log t. The fit basis is restricted to the predicted
// pole lattice s = d, d-1, ..., d-J plus regular powers t^k.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "eqres/quadrature.hpp"
#include "eqres/series.hpp"
#include "eqres/spectral.hpp"

namespace eqres {

struct HeatSample {
  cplx value;         // includes the zero-mode constant
  double tail_bound;  // certified bound on the dropped terms
};

/// Caches the terms of a series needed to evaluate its heat trace for t >= t_min.
class HeatTrace {
 public:
  /// Relative tail target for choosing the enumeration cutoff.
  static constexpr double tail_rel_tol = 1e-15;

  HeatTrace(SpectralSeries series, double t_min) : series_(std::move(series)) {
    require(t_min > 0, ErrorKind::invalid_parameter, "heat trace needs t > 0");
    t_floor_ = t_min;
    Lambda_ = needed_lambda(t_min);
    if (Lambda_ > series_.lambda_cap) {
      Lambda_ = series_.lambda_cap;
      // raise t until the capped enumeration meets the tail target
      double lo = t_min, hi = t_min;
      while (!tail_ok(Lambda_, hi)) hi *= 2;
      for (int it = 0; it < 60; ++it) {
        const double mid = std::sqrt(lo * hi);
        (tail_ok(Lambda_, mid) ? hi : lo) = mid;
      }
      t_floor_ = hi;
    }
    series_.enumerate(Lambda_, [this](double lam, cplx w) {
      const cplx wt = series_.weight(lam, w);
      if (wt != cplx(0)) terms_.push_back({series_.effective(lam), wt});
    });
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.lambda < b.lambda; });
  }

  /// Smallest t at which evaluation meets the tail target (>= requested t_min).
  double t_floor() const { return t_floor_; }
  double cutoff() const { return Lambda_; }
  std::size_t term_count() const { return terms_.size(); }
  cplx kernel() const { return series_.kernel; }
  const SpectralSeries& series() const { return series_; }
  double smallest_lambda() const { return terms_.empty() ? 1.0 : terms_.front().lambda; }

  /// Sum over positive eigenvalues only.
  cplx positive_part(double t) const {
    require(t > 0, ErrorKind::invalid_parameter, "heat trace needs t > 0");
    long double re = 0, im = 0;
    for (const auto& term : terms_) {
      const double e = std::exp(-t * term.lambda);
      if (e < 1e-300) break;
      re += static_cast<long double>(term.weight.real() * e);
      im += static_cast<long double>(term.weight.imag() * e);
    }
    return {double(re), double(im)};
  }

  /// sum |w_i| e^{-t lambda_i}; its ratio to |positive_part| measures cancellation.
  double abs_part(double t) const {
    long double a = 0;
    for (const auto& term : terms_) {
      const double e = std::exp(-t * term.lambda);
      if (e < 1e-300) break;
      a += static_cast<long double>(std::abs(term.weight) * e);
    }
    return double(a);
  }

  HeatSample operator()(double t) const { return {positive_part(t) + series_.kernel, tail_bound(t)}; }

  double tail_bound(double t) const {
    if (Lambda_ >= series_.lambda_cap && std::isinf(series_.lambda_cap)) return series_.density.heat_tail(Lambda_, t);
    return series_.density.heat_tail(Lambda_, t);
  }

 private:
  struct Term {
    double lambda;
    cplx weight;
  };

  double reference_scale(double t) const {
    const auto& d = series_.density;
    return d.coeff * std::tgamma(d.power + 1.0) / std::pow(t, d.power + 1) + d.constant / t + 1.0;
  }
  bool tail_ok(double Lambda, double t) const {
    return series_.density.heat_tail(Lambda, t) <= tail_rel_tol * reference_scale(t);
  }
  double needed_lambda(double t) const {
    double hi = 1.0 / t;
    while (!tail_ok(hi, t)) hi *= 1.5;
    double lo = hi / 1.5;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      (tail_ok(mid, t) ? hi : lo) = mid;
    }
    return hi;
  }

  SpectralSeries series_;
  double t_floor_ = 0;
  double Lambda_ = 0;
  std::vector<Term> terms_;
};

/// Theta(t) = sum_i w_i e^{-t lambda_i} + zero modes, with a certified tail bound.
inline HeatSample heat_trace(const SpectralSeries& series, double t) {
  require(t > 0, ErrorKind::invalid_parameter, "heat trace needs t > 0");
  return HeatTrace(series, t)(t);
}

inline HeatSample heat_trace(const EquivariantSpectrum& spec, std::size_t cls, double t) {
  return heat_trace(spec.series(cls), t);
}

// ---------------------------------------------------------------- direct sums

struct ZetaValue {
  cplx value;
  double error_estimate;
};

/// sum_i w_i lambda_i^{-z} for Re z > d + 1/2, with an exact progression tail where available.
inline ZetaValue zeta_direct(const SpectralSeries& series, cplx z, double d, double direct_cutoff = 200.0) {
  if (z.real() <= d + 0.5)
    fail(ErrorKind::outside_convergence,
         "Re z = " + std::to_string(z.real()) + " is not in the direct half-plane; use meromorphic_continue");
  const cplx zs = z - series.lambda_power;
  if (series.progression && series.inverse_perturbation == 0) {
    const auto& p = *series.progression;
    const double Lambda = std::max(direct_cutoff, p.lambda(p.first));
    cplx acc = 0;
    series.enumerate(Lambda, [&](double lam, cplx w) { acc += w * std::pow(lam, -zs); });
    acc += p.tail(p.first_beyond(Lambda), zs);
    return {acc, 1e-13 * (1 + std::abs(acc))};
  }
  // No closed tail: sum to the cap and bound the rest by the density.
  const double Lambda = std::min(series.lambda_cap, 4000.0);
  long double re = 0, im = 0, count = 0;
  series.enumerate(Lambda, [&](double lam, cplx w) {
    const cplx v = series.weight(lam, w) * std::pow(series.effective(lam), -z);
    re += static_cast<long double>(v.real());
    im += static_cast<long double>(v.imag());
    count += static_cast<long double>(w.real());
  });
  cplx acc{double(re), double(im)};
  const auto& dn = series.density;
  const double x = z.real() - series.lambda_power;
  if (series.mean_count && series.inverse_perturbation == 0) {
    // tail = int_Lambda^inf l^{-zs} dN = smooth part - P(Lambda) Lambda^{-zs} + zs int P l^{-zs-1},
    // with P = N - coeff l^power; the last integral oscillates and is bounded crudely.
    const auto [a, q] = *series.mean_count;
    const double P = double(count) - a * std::pow(Lambda, q);
    acc += a * q * std::pow(Lambda, q - zs) / (zs - q) - P * std::pow(Lambda, -zs);
    const double e = q / 4 + 0.25;  // lattice-remainder exponent, with margin
    const double err = std::abs(zs) * std::sqrt(a) * std::pow(Lambda, e - x) / std::max(x - e, 0.25);
    return {acc, err};
  }
  // int_Lambda^inf (c l^p + c0) l^{-x} dl
  double err = 0;
  if (dn.coeff > 0) err += dn.coeff * std::pow(Lambda, dn.power + 1 - x) / (x - dn.power - 1);
  if (dn.constant > 0) err += dn.constant * std::pow(Lambda, 1 - x) / (x - 1);
  return {acc, err};
}

inline ZetaValue zeta_direct(const EquivariantSpectrum& spec, std::size_t cls, cplx z) {
  const auto& f = spec.fixed.classes.at(cls);
  return zeta_direct(spec.series(cls), z, double(f.pole_dim()) / spec.operator_order);
}

// ---------------------------------------------------------------- continuation

struct ContinuationOptions {
  double t_min = 1e-4;
  double t_max = 1e-1;
  int points = 40;
  int regular_terms = 6;   // t^0 .. t^P
  int depth = -1;          // J; default reaches s = 0, i.e. max(d, 0)
  bool bogus_exponent = false;  // add t^{-(d+1)} to test lattice conformance
  double residual_tol = 1e-6;
  double condition_cap = 1e10;
  double window_ratio = 10;       // t_max >= window_ratio * t_floor when truncation raises the floor
  double cancellation_cap = 1e8;  // t_min rises until sum |w| e^{-t lambda} <= cap * |Theta|
};

struct PoleRecord {
  double s;
  cplx residue;
  cplx coefficient;  // raw coefficient of the heat-trace term
};

struct FitColumn {
  double exponent;  // t^exponent
  bool log;         // times log t
  std::string label() const {
    std::string e = exponent == 0 ? "" : "t^" + std::to_string(static_cast<int>(exponent));
    if (log) return e.empty() ? "log t" : e + " log t";
    return e.empty() ? "1" : e;
  }
};

struct FitReport {
  double residual = 0;   // max relative residual on the grid
  double condition = 0;  // of the column-normalized design matrix
  double t_min = 0, t_max = 0;
  int points = 0;
  std::optional<cplx> bogus_coefficient;
  double leading_scale = 0;
  bool reliable = true;
  std::vector<FitColumn> columns;
  std::vector<cplx> coefficients;
  std::vector<double> t_grid;
  std::vector<cplx> theta;  // positive part of Theta on the grid
};

class MeromorphicZeta {
 public:
  int d = 0;
  int depth = 0;
  std::vector<PoleRecord> poles;  // predicted lattice s = d, d-1, ..., d-J
  FitReport fit;
  cplx kernel = 0;

  const PoleRecord* pole_at(double s) const {
    for (const auto& p : poles)
      if (std::abs(p.s - s) < 1e-12) return &p;
    return nullptr;
  }
  cplx residue_at(double s) const {
    const auto* p = pole_at(s);
    return p ? p->residue : cplx(0);
  }
  cplx coefficient(double exponent, bool log) const {
    for (std::size_t i = 0; i < fit.columns.size(); ++i)
      if (fit.columns[i].exponent == exponent && fit.columns[i].log == log) return fit.coefficients[i];
    return 0;
  }

  /// zeta(z) at a non-pole point from the fitted singular part on (0, t0]
  /// and direct quadrature of the heat trace on [t0, inf).
  cplx regular_value_at(cplx z) const {
    require(heat_ != nullptr, ErrorKind::continuation_unreliable, "continuation has no heat-trace data");
    const double t0 = fit.t_max;
    const double lt0 = std::log(t0);
    cplx small = 0;
    for (std::size_t i = 0; i < fit.columns.size(); ++i) {
      const auto& c = fit.columns[i];
      const cplx a = z + c.exponent;  // int_0^t0 t^{z-1} t^e dt = t0^{a}/a
      const cplx pw = std::exp(a * lt0);
      small += fit.coefficients[i] * (c.log ? pw * (lt0 / a - 1.0 / (a * a)) : pw / a);
    }
    const double T = std::max(t0 * 2, 80.0 / heat_->smallest_lambda());
    const auto* h = heat_.get();
    auto integrand = [h, z](double u) {
      const double t = std::exp(u);
      return std::exp(z * u) * h->positive_part(t);
    };
    const double scale = std::abs(h->positive_part(t0)) * std::pow(t0, z.real()) + 1e-300;
    const auto big = integrate_adaptive(integrand, lt0, std::log(T), 1e-14 * scale, 16);
    return (small + big.value) / gamma(z);
  }

  void attach(std::shared_ptr<const HeatTrace> h) { heat_ = std::move(h); }
  const HeatTrace* heat() const { return heat_.get(); }

 private:
  std::shared_ptr<const HeatTrace> heat_;
};

namespace detail {

inline FitColumn pole_column(double s) { return s > 0 ? FitColumn{-s, false} : FitColumn{-s, true}; }

inline cplx residue_from_coefficient(double s, cplx c) {
  if (s > 0) return c / std::tgamma(s);
  const int k = static_cast<int>(std::lround(-s));
  return -c * std::tgamma(k + 1.0) * (k % 2 ? -1.0 : 1.0);
}

}  // namespace detail

inline MeromorphicZeta meromorphic_continue(const SpectralSeries& series, int d, const ContinuationOptions& opt = {}) {
  const int J = opt.depth < 0 ? std::max(d, 0) : opt.depth;
  require(J >= 0 && J <= std::max(d, 0) + 2 + 4, ErrorKind::invalid_parameter, "continuation depth out of range");
  auto heat = std::make_shared<HeatTrace>(series, opt.t_min);
  double t_lo = heat->t_floor();
  const double t_hi = std::max(opt.t_max, opt.window_ratio * t_lo);
  // oscillating weights cancel at small t; start where the summed terms exceed the sum by <= cancellation_cap
  auto cancels = [&](double t) {
    const double v = std::abs(heat->positive_part(t));
    return heat->abs_part(t) > opt.cancellation_cap * v;
  };
  if (heat->term_count() > 0 && cancels(t_lo)) {
    double lo = t_lo, hi = t_hi / 10;
    if (!cancels(hi)) {
      for (int it = 0; it < 40; ++it) {
        const double mid = std::sqrt(lo * hi);
        (cancels(mid) ? lo : hi) = mid;
      }
    }
    t_lo = hi;
  }

  MeromorphicZeta mz;
  mz.d = d;
  mz.depth = J;
  mz.kernel = series.kernel;

  // design columns
  std::vector<FitColumn> cols;
  std::vector<double> pole_s;
  if (opt.bogus_exponent) cols.push_back(detail::pole_column(d + 1));
  for (int j = 0; j <= J; ++j) {
    pole_s.push_back(d - j);
    cols.push_back(detail::pole_column(d - j));
  }
  for (int k = 0; k <= opt.regular_terms; ++k) {
    const FitColumn c{double(k), false};
    if (std::none_of(cols.begin(), cols.end(), [&](const FitColumn& o) { return o.exponent == c.exponent && o.log == c.log; }))
      cols.push_back(c);
  }

  const int n = opt.points;
  require(n > static_cast<int>(cols.size()), ErrorKind::too_few_points, "fit grid smaller than the basis");
  std::vector<double> ts(static_cast<std::size_t>(n));
  std::vector<cplx> th(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ts[static_cast<std::size_t>(i)] = t_lo * std::pow(t_hi / t_lo, double(i) / double(n - 1));
    th[static_cast<std::size_t>(i)] = heat->positive_part(ts[static_cast<std::size_t>(i)]);
  }
  double max_abs = 0;
  for (auto v : th) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0) {
    // Identically vanishing positive part: the continuation is entire and zero.
    mz.fit = FitReport{0, 1, t_lo, t_hi, n, std::nullopt, 0, true, cols,
                       std::vector<cplx>(cols.size(), 0), ts, th};
    if (opt.bogus_exponent) mz.fit.bogus_coefficient = cplx(0);
    for (double s : pole_s) mz.poles.push_back({s, 0, 0});
    mz.attach(std::move(heat));
    return mz;
  }
  const double floor = 1e-12 * max_abs + 1e-300;

  const auto m = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd A(n, m);
  Eigen::MatrixXd b(n, 2);
  for (int i = 0; i < n; ++i) {
    const double t = ts[static_cast<std::size_t>(i)];
    const double w = 1.0 / (std::abs(th[static_cast<std::size_t>(i)]) + floor);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& c = cols[static_cast<std::size_t>(j)];
      A(i, j) = w * std::pow(t, c.exponent) * (c.log ? std::log(t) : 1.0);
    }
    b(i, 0) = w * th[static_cast<std::size_t>(i)].real();
    b(i, 1) = w * th[static_cast<std::size_t>(i)].imag();
  }
  Eigen::VectorXd norms = A.colwise().norm();
  for (Eigen::Index j = 0; j < m; ++j) A.col(j) /= norms(j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  mz.fit.condition = sv(0) / sv(sv.size() - 1);
  Eigen::MatrixXd x = svd.solve(b);
  for (Eigen::Index j = 0; j < m; ++j) x.row(j) /= norms(j);

  mz.fit.columns = cols;
  for (Eigen::Index j = 0; j < m; ++j) mz.fit.coefficients.push_back({x(j, 0), x(j, 1)});
  mz.fit.t_min = t_lo;
  mz.fit.t_max = t_hi;
  mz.fit.points = n;
  mz.fit.t_grid = ts;
  mz.fit.theta = th;

  double resid = 0;
  for (int i = 0; i < n; ++i) {
    const double t = ts[static_cast<std::size_t>(i)];
    cplx model = 0;
    for (std::size_t j = 0; j < cols.size(); ++j)
      model += mz.fit.coefficients[j] * std::pow(t, cols[j].exponent) * (cols[j].log ? std::log(t) : 1.0);
    resid = std::max(resid, std::abs(model - th[static_cast<std::size_t>(i)]) / (std::abs(th[static_cast<std::size_t>(i)]) + floor));
  }
  mz.fit.residual = resid;

  if (opt.bogus_exponent) mz.fit.bogus_coefficient = mz.fit.coefficients.front();
  double lead = std::abs(mz.coefficient(0, false));
  for (double s : pole_s) {
    const auto c = detail::pole_column(s);
    lead = std::max(lead, std::abs(mz.coefficient(c.exponent, c.log)));
  }
  mz.fit.leading_scale = lead;

  mz.fit.reliable = resid <= opt.residual_tol && mz.fit.condition <= opt.condition_cap;
  if (mz.fit.reliable) {
    for (double s : pole_s) {
      const auto c = detail::pole_column(s);
      const cplx coef = mz.coefficient(c.exponent, c.log);
      mz.poles.push_back({s, detail::residue_from_coefficient(s, coef), coef});
    }
  }
  mz.attach(std::move(heat));
  return mz;
}

/// Throws continuation-unreliable when the fit diagnostics fail.
inline MeromorphicZeta meromorphic_continue_checked(const SpectralSeries& series, int d, const ContinuationOptions& opt = {}) {
  auto mz = meromorphic_continue(series, d, opt);
  if (!mz.fit.reliable)
    fail(mz.fit.condition > opt.condition_cap ? ErrorKind::fit_unstable : ErrorKind::continuation_unreliable,
         "heat-trace fit residual " + std::to_string(mz.fit.residual) + ", condition " + std::to_string(mz.fit.condition));
  return mz;
}

/// zeta(0) including the zero-mode contribution.
inline cplx regular_value_at_zero(const MeromorphicZeta& mz, double pole_tol = 1e-6) {
  require(mz.fit.reliable, ErrorKind::continuation_unreliable, "no reliable continuation");
  const cplx r0 = mz.residue_at(0.0);
  if (std::abs(r0) > pole_tol) fail(ErrorKind::pole_at_zero, "residue at 0 is " + std::to_string(std::abs(r0)));
  return mz.coefficient(0, false) + mz.kernel;
}

}  // namespace eqres
