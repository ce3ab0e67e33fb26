#pragma once

// Stationary phase for I(r) = int e^{i r f(x)} u(x) dx with a nondegenerate
// critical point x0:
//
//   I(r) ~ e^{i r f(x0)} sum_j M_j r^{-n/2-j},   M_j = L_j u (x0),
//   L_j u = det(f''/2 pi i)^{-1/2} sum_{nu-mu=j, 2nu>=3mu} i^{-j} 2^{-nu} <H^{-1}D,D>^nu (g^mu u)(x0) / (mu! nu!)
//
// with D = -i d/dx, H = f''(x0) and g the part of f beyond second order.

#include <Eigen/Dense>
#include <cmath>
#include <algorithm>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eqres/quadrature.hpp"
#include "eqres/taylor.hpp"

namespace eqres {

using cplx = std::complex<double>;
using ScalarField = std::function<cplx(const Point&)>;
/// Taylor coefficients at the critical point up to the requested total order.
using JetProvider = std::function<TaylorPoly(int order)>;

struct PhaseProblem {
  int n = 1;
  ScalarField f;
  ScalarField u;
  Point x0{0, 0};
  /// Box containing supp(u): [lo[k], hi[k]] per coordinate.
  Point lo{-1, -1}, hi{1, 1};
  /// Closed-form jets; finite differences of f and u are used when empty.
  JetProvider f_jet, u_jet;
  /// Length scale over which f and u vary; finite-difference steps are proportional to it.
  double fd_scale = 1.0;
};

namespace detail {

inline double factorial(int k) {
  double r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

inline TaylorPoly phase_jet(const PhaseProblem& p, int order) {
  return p.f_jet ? p.f_jet(order).truncated(order) : finite_difference_jet(p.f, p.n, p.x0, order, p.fd_scale);
}
inline TaylorPoly amplitude_jet(const PhaseProblem& p, int order) {
  return p.u_jet ? p.u_jet(order).truncated(order) : finite_difference_jet(p.u, p.n, p.x0, order, p.fd_scale);
}

inline Eigen::Matrix2cd hessian_from_jet(const TaylorPoly& jet) {
  Eigen::Matrix2cd H = Eigen::Matrix2cd::Zero();
  H(0, 0) = 2.0 * jet(2, 0);
  if (jet.n() == 2) {
    H(0, 1) = H(1, 0) = jet(1, 1);
    H(1, 1) = 2.0 * jet(0, 2);
  }
  return H;
}

}  // namespace detail

/// f''(x0) as an n x n block of a 2 x 2 matrix.
inline Eigen::Matrix2cd phase_hessian(const PhaseProblem& p) { return detail::hessian_from_jet(detail::phase_jet(p, 2)); }

/// Checks the critical-point invariants; throws invalid-parameter or singular-hessian.
inline void validate(const PhaseProblem& p) {
  require(p.n == 1 || p.n == 2, ErrorKind::invalid_parameter, "stationary phase supports n = 1 or 2");
  require(bool(p.f) && bool(p.u), ErrorKind::invalid_parameter, "phase problem needs f and u");
  for (int k = 0; k < p.n; ++k)
    require(p.lo[static_cast<std::size_t>(k)] < p.x0[static_cast<std::size_t>(k)] &&
                p.x0[static_cast<std::size_t>(k)] < p.hi[static_cast<std::size_t>(k)],
            ErrorKind::invalid_parameter, "critical point must be interior to the support box");
  const auto jet = detail::phase_jet(p, 2);
  const double scale = std::max(1.0, std::abs(jet(0, 0)));
  const double grad = std::abs(jet(1, 0)) + (p.n == 2 ? std::abs(jet(0, 1)) : 0.0);
  require(grad <= 1e-10 * scale * (p.f_jet ? 1.0 : 1e2), ErrorKind::invalid_parameter,
          "gradient of f does not vanish at x0 (|grad| = " + std::to_string(grad) + ")");
  require(jet(0, 0).imag() >= -1e-14, ErrorKind::invalid_parameter, "Im f(x0) must be >= 0");
  const auto H = detail::hessian_from_jet(jet);
  const cplx det = p.n == 1 ? H(0, 0) : H.determinant();
  require(std::abs(det) > 1e-10, ErrorKind::singular_hessian, "degenerate Hessian at the critical point");
}

/// det(H / 2 pi i)^{-1/2}; for real H this is |det(H/2pi)|^{-1/2} e^{i pi sgn(H)/4}.
inline cplx hessian_prefactor(const Eigen::Matrix2cd& H, int n) {
  const double two_pi = 2 * std::numbers::pi;
  const cplx I(0, 1);
  std::vector<cplx> eig;
  if (n == 1) {
    eig.push_back(H(0, 0));
  } else {
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(H);
    eig = {es.eigenvalues()(0), es.eigenvalues()(1)};
  }
  cplx r = 1;
  // each factor (mu / 2 pi i)^{-1/2} has Re(mu / i) >= 0 when Im mu >= 0: principal branch
  for (const cplx mu : eig) r *= 1.0 / std::sqrt(mu / (two_pi * I));
  return r;
}

/// M_j = L_j(u)(x0) for j <= 3.
inline cplx lj_apply(const PhaseProblem& p, int j) {
  require(j >= 0 && j <= 3, ErrorKind::invalid_parameter, "lj_apply supports 0 <= j <= 3");
  validate(p);
  const int n = p.n;
  const auto fj = detail::phase_jet(p, 2 * j + 2);
  const auto uj = detail::amplitude_jet(p, 2 * j);
  const auto H = detail::hessian_from_jet(fj);
  Eigen::Matrix2cd Hinv = Eigen::Matrix2cd::Zero();
  if (n == 1) {
    Hinv(0, 0) = 1.0 / H(0, 0);
  } else {
    Hinv = H.inverse();
  }

  // symbol of <H^{-1}D, D> = -sum Hinv_kl d_k d_l, as a polynomial in the dual variable
  TaylorPoly q(n, 2);
  q(2, 0) = -Hinv(0, 0);
  if (n == 2) {
    q(1, 1) = -(Hinv(0, 1) + Hinv(1, 0));
    q(0, 2) = -Hinv(1, 1);
  }
  const TaylorPoly g = fj.without_below(3);

  const cplx I(0, 1);
  cplx total = 0;
  for (int mu = 0; mu <= 2 * j; ++mu) {
    const int nu = j + mu;
    if (2 * nu < 3 * mu) continue;
    const int deg = 2 * nu;
    // g^mu u up to degree 2 nu; g^mu starts at degree 3 mu
    TaylorPoly gu(n, deg);
    {
      TaylorPoly gd = g.truncated(std::max(deg, 3));
      TaylorPoly gm(n, deg);
      gm(0, 0) = 1;
      for (int i = 0; i < mu; ++i) gm = (gm * gd.truncated(deg)).truncated(deg);
      TaylorPoly ud(n, deg);
      uj.for_each([&](int a, int b, cplx v) {
        if (a + b <= deg) ud(a, b) = v;
      });
      gu = gm * ud;
    }
    TaylorPoly qd(n, deg);
    q.for_each([&](int a, int b, cplx v) {
      if (a + b <= deg) qd(a, b) = v;
    });
    const TaylorPoly op = qd.pow(nu);
    // d^alpha x^beta at 0 = alpha! delta
    cplx val = 0;
    op.for_each([&](int a, int b, cplx c) {
      if (a + b == deg && c != cplx(0)) val += c * detail::factorial(a) * detail::factorial(b) * gu(a, b);
    });
    total += std::pow(I, -j) * std::pow(2.0, -nu) / (detail::factorial(mu) * detail::factorial(nu)) * val;
  }
  return hessian_prefactor(H, n) * total;
}

// ---------------------------------------------------------------- quadrature oracle

struct OscillatoryOptions {
  double rel_tol = 1e-10;  // absolute target rel_tol * (1 + r)^{-n/2}
  std::size_t budget = std::size_t(1) << 22;
  int samples = 400;       // for the |grad f| estimate
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline double max_slope_1d(const std::function<cplx(double)>& f, double a, double b, int samples) {
  double m = 0;
  const double h = (b - a) / samples;
  for (int i = 0; i < samples; ++i) m = std::max(m, std::abs(f(a + (i + 1) * h) - f(a + i * h)) / h);
  return m;
}

}  // namespace detail

/// Adaptive quadrature of int e^{i r f} u over the support box.
inline QuadratureResult oscillatory_integral(const PhaseProblem& p, double r, const OscillatoryOptions& opt = {}) {
  require(r > 0, ErrorKind::invalid_parameter, "oscillatory_integral needs r > 0");
  require(p.n == 1 || p.n == 2, ErrorKind::invalid_parameter, "stationary phase supports n = 1 or 2");
  const double target = opt.rel_tol * std::pow(1 + r, -0.5 * p.n);
  const cplx I(0, 1);
  const double two_pi = 2 * std::numbers::pi;
  if (p.n == 1) {
    const double a = p.lo[0], b = p.hi[0];
    const double slope = detail::max_slope_1d([&](double x) { return p.f({x, p.x0[1]}); }, a, b, opt.samples);
    const auto panels = static_cast<std::size_t>(std::ceil(r * slope * (b - a) / two_pi)) + 8;
    if (panels * 15 > opt.budget)
      fail(ErrorKind::budget_exceeded, "r = " + std::to_string(r) + " needs about " + std::to_string(panels) +
                                           " panels; exceeds the evaluation budget");
    auto res = integrate_adaptive([&](double x) { return std::exp(I * r * p.f({x, p.x0[1]})) * p.u({x, p.x0[1]}); },
                                  a, b, target, panels, opt.budget);
    if (!res.converged)
      fail(ErrorKind::budget_exceeded, "quadrature stopped at error " + detail::sci(res.error_estimate) + " (target " +
                                           detail::sci(target) + ") after " + std::to_string(res.evaluations) +
                                           " evaluations");
    return res;
  }
  // nested: outer over x, inner over y
  const double ax = p.lo[0], bx = p.hi[0], ay = p.lo[1], by = p.hi[1];
  double slope = 0;
  for (int i = 0; i <= 20; ++i) {
    const double x = ax + (bx - ax) * i / 20, y = ay + (by - ay) * i / 20;
    slope = std::max(slope, detail::max_slope_1d([&](double t) { return p.f({t, y}); }, ax, bx, opt.samples / 4));
    slope = std::max(slope, detail::max_slope_1d([&](double t) { return p.f({x, t}); }, ay, by, opt.samples / 4));
  }
  const auto px = static_cast<std::size_t>(std::ceil(r * slope * (bx - ax) / two_pi)) + 4;
  const auto py = static_cast<std::size_t>(std::ceil(r * slope * (by - ay) / two_pi)) + 4;
  if (px * py * 225 > opt.budget)
    fail(ErrorKind::budget_exceeded, "r = " + std::to_string(r) + " exceeds the 2d evaluation budget");
  std::size_t evals = 0;
  bool ok = true;
  const double inner_tol = target / (bx - ax) / 4;
  auto inner = [&](double x) {
    auto res = integrate_adaptive([&](double y) { return std::exp(I * r * p.f({x, y})) * p.u({x, y}); }, ay, by,
                                  inner_tol, py, opt.budget);
    evals += res.evaluations;
    ok = ok && res.converged;
    return res.value;
  };
  auto res = integrate_adaptive(inner, ax, bx, target / 2, px, opt.budget);
  res.evaluations = evals;
  if (!ok || !res.converged || evals > opt.budget)
    fail(ErrorKind::budget_exceeded, "2d quadrature used " + std::to_string(evals) + " evaluations, error " +
                                         detail::sci(res.error_estimate));
  return res;
}

// ---------------------------------------------------------------- expansion fit

struct ExpansionResult {
  std::vector<cplx> coefficients;  // M_0 .. M_J
  double remainder_exponent = 0;   // -n/2 - J - 1
  std::vector<double> r_grid;
  std::vector<cplx> integrals;     // I(r)
  std::vector<double> fit_residuals;  // |I e^{-i r f0} - sum M_j r^{-n/2-j}|
  double condition = 0;
};

/// r_0, r_0 q, ..., geometric grid of `count` points from a to b.
inline std::vector<double> geometric_grid(double a, double b, int count) {
  require(a > 0 && b > a && count >= 2, ErrorKind::invalid_parameter, "bad geometric grid");
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(a * std::pow(b / a, double(i) / (count - 1)));
  return g;
}

/// Least-squares fit of I(r) e^{-i r f(x0)} against r^{-n/2-j}, j <= J.
inline ExpansionResult expansion_fit(const PhaseProblem& p, const std::vector<double>& r_grid, int J,
                                     const OscillatoryOptions& opt = {}) {
  require(J >= 0, ErrorKind::invalid_parameter, "negative expansion depth");
  require(r_grid.size() >= static_cast<std::size_t>(2 * (J + 2)), ErrorKind::too_few_points,
          "expansion_fit needs at least 2(J+2) radii");
  const auto [rmin, rmax] = std::minmax_element(r_grid.begin(), r_grid.end());
  require(*rmin > 0 && *rmax / *rmin >= 100 * (1 - 1e-12), ErrorKind::too_few_points,
          "expansion_fit needs radii spanning two decades");
  const cplx f0 = p.f(p.x0);
  const cplx I(0, 1);
  ExpansionResult out;
  out.r_grid = r_grid;
  out.remainder_exponent = -0.5 * p.n - J - 1;
  const auto m = static_cast<Eigen::Index>(r_grid.size());
  Eigen::MatrixXd A(m, J + 1);
  Eigen::MatrixXd b(m, 2);
  std::vector<cplx> y;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = r_grid[static_cast<std::size_t>(i)];
    const cplx Ir = oscillatory_integral(p, r, opt).value;
    out.integrals.push_back(Ir);
    // rows scaled by r^{n/2}: basis r^{-j}
    const cplx v = Ir * std::exp(-I * r * f0) * std::pow(r, 0.5 * p.n);
    y.push_back(v);
    for (int j = 0; j <= J; ++j) A(i, j) = std::pow(r, -double(j));
    b(i, 0) = v.real();
    b(i, 1) = v.imag();
  }
  Eigen::VectorXd norms = A.colwise().norm();
  for (int j = 0; j <= J; ++j) A.col(j) /= norms(j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  out.condition = sv(0) / sv(sv.size() - 1);
  if (!(out.condition <= 1e10)) fail(ErrorKind::fit_unstable, "expansion fit condition " + std::to_string(out.condition));
  Eigen::MatrixXd x = svd.solve(b);
  for (int j = 0; j <= J; ++j) out.coefficients.push_back(cplx(x(j, 0), x(j, 1)) / norms(j));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = r_grid[static_cast<std::size_t>(i)];
    cplx model = 0;
    for (int j = 0; j <= J; ++j) model += out.coefficients[static_cast<std::size_t>(j)] * std::pow(r, -double(j));
    out.fit_residuals.push_back(std::abs(y[static_cast<std::size_t>(i)] - model) * std::pow(r, -0.5 * p.n));
  }
  return out;
}

/// Log-log slope of |I(r) e^{-i r f0} - sum_{j<=J} M_j r^{-n/2-j}| against r.
inline double remainder_slope(const PhaseProblem& p, const std::vector<double>& r_grid, const std::vector<cplx>& M,
                              const std::vector<cplx>& integrals) {
  require(r_grid.size() == integrals.size() && r_grid.size() >= 2, ErrorKind::too_few_points, "need paired samples");
  const cplx f0 = p.f(p.x0);
  const cplx I(0, 1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(r_grid.size());
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double r = r_grid[i];
    cplx rem = integrals[i] * std::exp(-I * r * f0);
    for (std::size_t j = 0; j < M.size(); ++j) rem -= M[j] * std::pow(r, -0.5 * p.n - double(j));
    const double lx = std::log(r), ly = std::log(std::abs(rem));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Decay check for a phase without critical points in the support.
struct DecayReport {
  std::vector<double> r_grid;
  std::vector<double> magnitude;  // |I(r)|
  std::vector<double> floor;      // quadrature roundoff floor per r
  double threshold = 0;           // first r from which |I| < max(r^{-power}, floor) holds
  bool holds = false;             // threshold found and at least one resolvable point beyond it
};

inline DecayReport nonstationary_decay(const PhaseProblem& p, const std::vector<double>& r_grid, double power = 6,
                                       const OscillatoryOptions& opt = {}) {
  DecayReport rep;
  rep.r_grid = r_grid;
  for (double r : r_grid) {
    const auto q = oscillatory_integral(p, r, opt);
    rep.magnitude.push_back(std::abs(q.value));
    rep.floor.push_back(std::max(q.roundoff_floor, q.error_estimate));
  }
  std::size_t start = r_grid.size();
  for (std::size_t i = r_grid.size(); i-- > 0;) {
    if (rep.magnitude[i] < std::max(std::pow(r_grid[i], -power), rep.floor[i])) {
      start = i;
    } else {
      break;
    }
  }
  if (start < r_grid.size()) {
    rep.threshold = r_grid[start];
    for (std::size_t i = start; i < r_grid.size(); ++i)
      if (std::pow(r_grid[i], -power) > rep.floor[i]) rep.holds = true;
  }
  return rep;
}

// ---------------------------------------------------------------- test amplitudes

/// C-infinity step: 0 for s <= 0, 1 for s >= 1.
inline double smooth_step(double s) {
  if (s <= 0) return 0;
  if (s >= 1) return 1;
  const double a = std::exp(-1 / s), b = std::exp(-1 / (1 - s));
  return a / (a + b);
}

/// 1 on |x| <= flat, 0 on |x| >= width, smooth in between.
inline double flat_top(double x, double flat, double width) {
  return smooth_step((width - std::abs(x)) / (width - flat));
}

/// exp(-x^2/(w^2 - x^2)) on |x| < w: the standard bump rescaled to half-width w, with u(0) = 1.
inline double standard_bump(double x, double w = 1) {
  return std::abs(x) >= w ? 0.0 : std::exp(-x * x / (w * w - x * x));
}

/// Named model problems for the CLI and the acceptance checks.
///   gaussian:      f = x^2/2, u flat-top (1 on |x| <= 1/2, 0 past 1)
///   cubic:         f = x^2/2 + x^3, u flat-top on |x| <= 0.05 (closed-form jets)
///   cubic-fd:      the same through finite differences
///   nonstationary: f = x, u = exp(-(x-1)^2/2) on [-9, 11]
///   gaussian-2d:   f = x^2/2 - y^2, u a product of flat-tops
inline PhaseProblem model_phase_problem(const std::string& name) {
  PhaseProblem p;
  if (name == "gaussian") {
    p.f = [](const Point& x) { return cplx(0.5 * x[0] * x[0]); };
    p.u = [](const Point& x) { return cplx(flat_top(x[0], 0.5, 1.0)); };
  } else if (name == "cubic" || name == "cubic-fd") {
    p.f = [](const Point& x) { return cplx(0.5 * x[0] * x[0] + x[0] * x[0] * x[0]); };
    p.u = [](const Point& x) { return cplx(flat_top(x[0], 0.05, 0.2)); };
    p.lo = {-0.2, -1};
    p.hi = {0.2, 1};
    p.fd_scale = 0.1;
    if (name == "cubic") {
      p.f_jet = [](int order) {
        TaylorPoly t(1, std::max(order, 3));
        t(2) = 0.5;
        t(3) = 1;
        return t;
      };
      p.u_jet = [](int order) {
        TaylorPoly t(1, order);
        t(0) = 1;
        return t;
      };
    }
  } else if (name == "nonstationary") {
    p.f = [](const Point& x) { return cplx(x[0]); };
    p.u = [](const Point& x) { return cplx(std::exp(-0.5 * (x[0] - 1) * (x[0] - 1))); };
    p.x0 = {1, 0};
    p.lo = {-9, -1};
    p.hi = {11, 1};
  } else if (name == "gaussian-2d") {
    p.n = 2;
    p.f = [](const Point& x) { return cplx(0.5 * x[0] * x[0] - x[1] * x[1]); };
    p.u = [](const Point& x) { return cplx(flat_top(x[0], 0.5, 1) * flat_top(x[1], 0.5, 1)); };
  } else {
    fail(ErrorKind::invalid_parameter, "unknown phase problem '" + name + "'");
  }
  return p;
}

}  // namespace eqres
