#pragma once

// Truncated Taylor polynomials in one or two variables, and finite-difference
// jets of sampled functions.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "eqres/error.hpp"

namespace eqres {

using Point = std::array<double, 2>;

/// sum_{a+b <= order} c[a][b] x^a y^b  (n = 1 keeps b = 0).
class TaylorPoly {
 public:
  using C = std::complex<double>;

  TaylorPoly() = default;
  TaylorPoly(int n, int order) : n_(n), order_(order), c_(static_cast<std::size_t>((order + 1) * (order + 1)), C(0)) {
    require(n == 1 || n == 2, ErrorKind::invalid_parameter, "Taylor polynomials support n = 1 or 2");
    require(order >= 0, ErrorKind::invalid_parameter, "negative Taylor order");
  }

  int n() const { return n_; }
  int order() const { return order_; }

  C& operator()(int a, int b = 0) { return c_[idx(a, b)]; }
  C operator()(int a, int b = 0) const {
    if (a < 0 || b < 0 || a + b > order_ || (n_ == 1 && b != 0)) return 0;
    return c_[idx(a, b)];
  }

  template <class F>
  void for_each(F&& f) const {
    for (int a = 0; a <= order_; ++a)
      for (int b = 0; b <= (n_ == 2 ? order_ - a : 0); ++b) f(a, b, c_[idx(a, b)]);
  }

  TaylorPoly truncated(int order) const {
    TaylorPoly r(n_, order);
    for_each([&](int a, int b, C v) {
      if (a + b <= order) r(a, b) = v;
    });
    return r;
  }

  /// Drops all terms of total degree below `degree`.
  TaylorPoly without_below(int degree) const {
    TaylorPoly r = *this;
    r.for_each([&](int a, int b, C) {
      if (a + b < degree) r(a, b) = 0;
    });
    return r;
  }

  friend TaylorPoly operator+(TaylorPoly x, const TaylorPoly& y) {
    x.for_each([&](int a, int b, C) { x(a, b) += y(a, b); });
    return x;
  }
  friend TaylorPoly operator*(C s, TaylorPoly x) {
    for (auto& v : x.c_) v *= s;
    return x;
  }

  /// Product truncated at the smaller order of the two factors.
  friend TaylorPoly operator*(const TaylorPoly& x, const TaylorPoly& y) {
    require(x.n_ == y.n_, ErrorKind::invalid_parameter, "Taylor dimension mismatch");
    TaylorPoly r(x.n_, std::min(x.order_, y.order_));
    x.for_each([&](int a, int b, C u) {
      if (u == C(0)) return;
      y.for_each([&](int p, int q, C v) {
        if (a + p + b + q <= r.order_) r(a + p, b + q) += u * v;
      });
    });
    return r;
  }

  TaylorPoly pow(int k) const {
    TaylorPoly r(n_, order_);
    r(0, 0) = 1;
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

 private:
  std::size_t idx(int a, int b) const {
    require(a >= 0 && b >= 0 && a + b <= order_ && (n_ == 2 || b == 0), ErrorKind::invalid_parameter,
            "Taylor index out of range");
    return static_cast<std::size_t>(a * (order_ + 1) + b);
  }

  int n_ = 1;
  int order_ = 0;
  std::vector<C> c_;
};

namespace detail {

/// Fornberg weights: w[m][k] approximates the m-th derivative at 0 from samples at nodes[k].
inline std::vector<std::vector<double>> fornberg(const std::vector<double>& nodes, int max_m) {
  const auto N = nodes.size();
  std::vector<std::vector<double>> w(static_cast<std::size_t>(max_m + 1), std::vector<double>(N, 0.0));
  double c1 = 1, c4 = nodes[0];
  w[0][0] = 1;
  for (std::size_t i = 1; i < N; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), max_m);
    double c2 = 1;
    const double c5 = c4;
    c4 = nodes[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          w[k][i] = c1 * (k * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
        w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) w[k][j] = (c4 * w[k][j] - k * w[k - 1][j]) / c3;
      w[0][j] = c4 * w[0][j] / c3;
    }
    c1 = c2;
  }
  return w;
}

}  // namespace detail

/// Taylor coefficients of f at x0 up to total order `order` by central differences.
/// Degree d uses step eps^{1/(d+p)} * scale (p the stencil order) and is Richardson-extrapolated once.
inline TaylorPoly finite_difference_jet(const std::function<std::complex<double>(const Point&)>& f, int n,
                                        const Point& x0, int order, double scale = 1.0) {
  TaylorPoly jet(n, order);
  const double eps = std::numeric_limits<double>::epsilon();
  const double base = scale * std::max(1.0, std::max(std::abs(x0[0]), std::abs(x0[1])));
  for (int d = 0; d <= order; ++d) {
    const int M = d / 2 + 2;
    std::vector<double> nodes;
    for (int k = -M; k <= M; ++k) nodes.push_back(double(k));
    const auto W = detail::fornberg(nodes, d);
    // central stencil with 2M+1 nodes: leading error h^p; the step balances it against eps / h^d
    const int p = 2 * M + 2 - d - (d % 2);
    const double h0 = std::pow(eps, 1.0 / (d + p)) * base;
    require(h0 > 1e-300 && h0 * 1e-8 < base, ErrorKind::numeric_precision, "finite-difference step underflow");
    auto estimate = [&](double h, int a, int b) {
      std::complex<double> acc = 0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (n == 1) {
          if (W[a][i] != 0) acc += W[a][i] * f({x0[0] + h * nodes[i], x0[1]});
          continue;
        }
        if (W[a][i] == 0) continue;
        for (std::size_t j = 0; j < nodes.size(); ++j)
          if (W[b][j] != 0) acc += W[a][i] * W[b][j] * f({x0[0] + h * nodes[i], x0[1] + h * nodes[j]});
      }
      return acc / std::pow(h, d);
    };
    const double rich = std::pow(2.0, p);
    for (int a = d; a >= (n == 1 ? d : 0); --a) {
      const int b = d - a;
      const auto coarse = estimate(h0, a, b), fine = estimate(h0 / 2, a, b);
      double fa = 1, fb = 1;
      for (int i = 2; i <= a; ++i) fa *= i;
      for (int i = 2; i <= b; ++i) fb *= i;
      jet(a, b) = (rich * fine - coarse) / (rich - 1) / (fa * fb);
    }
  }
  return jet;
}

}  // namespace eqres
