#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "eqres/error.hpp"

namespace eqres {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
inline GaussRule gauss_legendre(std::size_t n) {
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * double(k) - 1) * x * p1 - (double(k) - 1) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = double(n) * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * double(k) - 1) * x * p1 - (double(k) - 1) * p0) / double(k);
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1;
    dp = double(n) * (x * p1 - p0) / (x * x - 1);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1 - x * x) * dp * dp);
  }
  return rule;
}

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate = 0;
  std::size_t evaluations = 0;
  bool converged = true;
  double roundoff_floor = 0;  // 50 eps int |f|: results below this are indistinguishable from 0
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> gk_x = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                               0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                               0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                               0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk_wk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                                0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                                0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                                0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk_wg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                                0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
  std::complex<double> value;
  double error;
  double abs_value;  // Kronrod estimate of int |f|
};

template <class F>
PanelEstimate gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const std::complex<double> fc = f(c);
  std::complex<double> k = fc * gk_wk[7];
  std::complex<double> g = fc * gk_wg[3];
  double kabs = std::abs(fc) * gk_wk[7];
  for (int i = 0; i < 7; ++i) {
    const std::complex<double> f1 = f(c - h * gk_x[i]), f2 = f(c + h * gk_x[i]);
    k += gk_wk[i] * (f1 + f2);
    kabs += gk_wk[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) g += gk_wg[i / 2] * (f1 + f2);
  }
  return {k * h, std::abs((k - g) * h), kabs * std::abs(h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of a complex integrand over [a, b].
/// The interval is first cut into `initial_panels` pieces; panels with the
/// largest error are bisected until the total error is below abs_tol (or the
/// roundoff floor 50 eps int |f|) or the evaluation budget is spent.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, double abs_tol, std::size_t initial_panels = 1,
                                    std::size_t max_evals = std::size_t(1) << 22) {
  struct Panel {
    double a, b;
    std::complex<double> value;
    double err;
    double abs_value;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  std::priority_queue<Panel> heap;
  QuadratureResult res{0.0, 0.0, 0, true, 0.0};
  initial_panels = std::max<std::size_t>(1, initial_panels);
  require(initial_panels * 15 <= max_evals, ErrorKind::budget_exceeded,
          "initial panel count alone exceeds the evaluation budget");
  const double w = (b - a) / double(initial_panels);
  for (std::size_t i = 0; i < initial_panels; ++i) {
    const double pa = a + w * double(i), pb = i + 1 == initial_panels ? b : a + w * double(i + 1);
    const auto est = detail::gk15(f, pa, pb);
    heap.push({pa, pb, est.value, est.error, est.abs_value});
    res.evaluations += 15;
  }
  auto totals = [&] {
    std::complex<double> v = 0;
    double e = 0;
    auto copy = heap;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().err;
      copy.pop();
    }
    return std::pair{v, e};
  };
  double err_sum = 0, abs_sum = 0;
  {
    auto copy = heap;
    while (!copy.empty()) {
      err_sum += copy.top().err;
      abs_sum += copy.top().abs_value;
      copy.pop();
    }
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  while (err_sum > std::max(abs_tol, 50 * eps * abs_sum)) {
    if (res.evaluations + 30 > max_evals) {
      res.converged = false;
      break;
    }
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    const auto l = detail::gk15(f, p.a, m), r = detail::gk15(f, m, p.b);
    res.evaluations += 30;
    err_sum += l.error + r.error - p.err;
    abs_sum += l.abs_value + r.abs_value - p.abs_value;
    heap.push({p.a, m, l.value, l.error, l.abs_value});
    heap.push({m, p.b, r.value, r.error, r.abs_value});
    if (m == p.a || m == p.b) {
      res.converged = false;
      break;
    }
  }
  auto [v, e] = totals();
  res.value = v;
  res.error_estimate = e;
  res.roundoff_floor = 50 * eps * abs_sum;
  return res;
}

}  // namespace eqres
