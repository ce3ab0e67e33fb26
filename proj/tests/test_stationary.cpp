#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "eqres/stationary_phase.hpp"

using namespace eqres;
using std::numbers::pi;

namespace {

const cplx I1(0, 1);
const cplx gauss_M0 = std::sqrt(2 * pi) * std::polar(1.0, pi / 4);

PhaseProblem gaussian_phase(double flat = 0.5, double width = 1.0) {
  PhaseProblem p;
  p.f = [](const Point& x) { return cplx(0.5 * x[0] * x[0]); };
  p.u = [=](const Point& x) { return cplx(flat_top(x[0], flat, width)); };
  p.lo = {-width, -1};
  p.hi = {width, 1};
  return p;
}

// f = x^2/2 + x^3; u == 1 near 0 so every amplitude derivative vanishes there.
// The second critical point x = -1/3 lies outside the support.
PhaseProblem cubic_phase(bool closed_form) {
  PhaseProblem p;
  p.f = [](const Point& x) { return cplx(0.5 * x[0] * x[0] + x[0] * x[0] * x[0]); };
  p.u = [](const Point& x) { return cplx(flat_top(x[0], 0.05, 0.2)); };
  p.lo = {-0.2, -1};
  p.hi = {0.2, 1};
  p.fd_scale = 0.1;  // stencils must stay inside the flat part of u
  if (closed_form) {
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
  return p;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Taylor, ProductAndPower) {
  TaylorPoly x(2, 4);
  x(1, 0) = 1;
  x(0, 1) = 2;  // x + 2y
  const auto sq = x.pow(2);
  EXPECT_EQ(sq(2, 0), cplx(1));
  EXPECT_EQ(sq(1, 1), cplx(4));
  EXPECT_EQ(sq(0, 2), cplx(4));
  const auto p5 = x.pow(5);
  EXPECT_EQ(p5(5, 0), cplx(0));  // truncated at order 4
}

TEST(Taylor, FiniteDifferenceJetOfExponential) {
  auto f = [](const Point& x) { return cplx(std::exp(x[0] + 0.5 * x[1])); };
  const auto jet = finite_difference_jet(f, 2, {0.1, -0.2}, 4);
  const double e0 = std::exp(0.1 - 0.1);
  // coefficient of x^a y^b: e0 * 0.5^b / (a! b!)
  const double fact[] = {1, 1, 2, 6, 24};
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      const double exact = e0 * std::pow(0.5, b) / (fact[a] * fact[b]);
      EXPECT_NEAR(jet(a, b).real(), exact, 1e-6 * (1 + a + b) * (1 + a + b)) << a << "," << b;
    }
}

TEST(LjApply, GaussianPhaseLeadingTerm) {
  auto p = gaussian_phase();
  EXPECT_LT(rel(lj_apply(p, 0), gauss_M0), 1e-12);
  EXPECT_NEAR(std::abs(lj_apply(p, 1)), 0, 1e-5);  // u is flat at 0
}

TEST(LjApply, GaussianPhaseSecondDerivativeTerm) {
  // u = exp(-c x^2/2): u''(0) = -c; M_1 = sqrt(2 pi) e^{i pi/4} * (i/2) u''(0)
  for (double c : {0.5, 1.0, 3.0}) {
    PhaseProblem p = gaussian_phase();
    p.u = [c](const Point& x) { return cplx(std::exp(-0.5 * c * x[0] * x[0])); };
    const cplx expect = gauss_M0 * I1 * 0.5 * (-c);
    EXPECT_LT(rel(lj_apply(p, 1), expect), 1e-6) << c;
    // exact: int e^{i r x^2/2 - c x^2/2} = sqrt(2 pi / (c - i r)); expand in 1/r
    // sqrt(2pi/(-ir)) (1 + i c/r)^{-1/2}: M_2 = M_0 * (3/8)(i c)^2
    EXPECT_LT(rel(lj_apply(p, 2), gauss_M0 * 0.375 * std::pow(I1 * c, 2)), 1e-4) << c;
  }
}

TEST(LjApply, CubicRemainderClosedFormAndFiniteDifferences) {
  // only (nu, mu) = (3, 2) contributes: i^{-1} 2^{-3} / (2! 3!) * (-d^2)^3 x^6 = 7.5 i
  const cplx expect = gauss_M0 * 7.5 * I1;
  EXPECT_LT(rel(lj_apply(cubic_phase(true), 1), expect), 1e-12);
  EXPECT_LT(rel(lj_apply(cubic_phase(false), 1), expect), 1e-6);
  EXPECT_LT(rel(lj_apply(cubic_phase(false), 2), lj_apply(cubic_phase(true), 2)), 1e-4);
}

TEST(LjApply, LinearInAmplitude) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  auto random_jet = [&](std::vector<double>& c) {
    c.resize(7);
    for (auto& v : c) v = U(rng);
  };
  auto poly = [](const std::vector<double>& c) {
    return [c](const Point& x) {
      cplx acc = 0;
      for (std::size_t k = c.size(); k-- > 0;) acc = acc * x[0] + c[k];
      return acc;
    };
  };
  auto jet_of = [](std::vector<cplx> c) {
    return [c](int order) {
      TaylorPoly t(1, order);
      for (int k = 0; k <= order && k < int(c.size()); ++k) t(k) = c[static_cast<std::size_t>(k)];
      return t;
    };
  };
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> c1, c2;
    random_jet(c1);
    random_jet(c2);
    const cplx s(U(rng), U(rng)), t(U(rng), U(rng));
    std::vector<cplx> j1(c1.begin(), c1.end()), j2(c2.begin(), c2.end()), j12;
    for (std::size_t k = 0; k < c1.size(); ++k) j12.push_back(s * c1[k] + t * c2[k]);
    auto p1 = cubic_phase(true), p2 = cubic_phase(true), p12 = cubic_phase(true);
    p1.u_jet = jet_of(j1);
    p2.u_jet = jet_of(j2);
    p12.u_jet = jet_of(j12);
    // the same amplitudes through finite differences
    auto q1 = cubic_phase(false), q2 = cubic_phase(false), q12 = cubic_phase(false);
    q1.u = poly(c1);
    q2.u = poly(c2);
    q12.u = [=, u1 = poly(c1), u2 = poly(c2)](const Point& x) { return s * u1(x) + t * u2(x); };
    for (int j = 0; j <= 2; ++j) {
      const cplx lhs = lj_apply(p12, j), rhs = s * lj_apply(p1, j) + t * lj_apply(p2, j);
      EXPECT_LT(std::abs(lhs - rhs), 1e-10 * (1 + std::abs(lhs))) << j;
      const cplx flhs = lj_apply(q12, j), frhs = s * lj_apply(q1, j) + t * lj_apply(q2, j);
      EXPECT_LT(std::abs(flhs - frhs), 1e-6 * (1 + std::abs(flhs))) << j;
      EXPECT_LT(std::abs(flhs - lhs), 1e-6 * (1 + std::abs(lhs))) << j;
    }
  }
}

TEST(LjApply, TwoDimensionalSeparableProducts) {
  // f = (x^2/2 + x^3) - (y^2 - y^3/3), u = product: M_j is the Cauchy product of the 1d expansions
  auto fx = [](double x) { return 0.5 * x * x + x * x * x; };
  auto fy = [](double y) { return -(y * y - y * y * y / 3); };
  auto ux = [](double x) { return std::exp(-x * x); };
  auto uy = [](double y) { return std::cos(y); };
  PhaseProblem px, py, p2;
  px.f = [&](const Point& x) { return cplx(fx(x[0])); };
  px.u = [&](const Point& x) { return cplx(ux(x[0])); };
  py.f = [&](const Point& x) { return cplx(fy(x[0])); };
  py.u = [&](const Point& x) { return cplx(uy(x[0])); };
  p2.n = 2;
  p2.f = [&](const Point& x) { return cplx(fx(x[0]) + fy(x[1])); };
  p2.u = [&](const Point& x) { return cplx(ux(x[0]) * uy(x[1])); };
  for (int j = 0; j <= 2; ++j) {
    cplx expect = 0;
    for (int k = 0; k <= j; ++k) expect += lj_apply(px, k) * lj_apply(py, j - k);
    EXPECT_LT(rel(lj_apply(p2, j), expect), 1e-5) << j;
  }
  // signature 0: |det/2pi|^{-1/2} with no phase
  const cplx pre = hessian_prefactor(phase_hessian(p2), 2);
  EXPECT_NEAR(std::abs(pre - cplx(2 * pi / std::sqrt(2.0))), 0, 1e-6);
}

TEST(LjApply, Errors) {
  auto p = gaussian_phase();
  EXPECT_THROW(lj_apply(p, 4), Error);
  p.x0 = {0.3, 0};
  EXPECT_THROW(lj_apply(p, 0), Error);  // not a critical point
  PhaseProblem flat = gaussian_phase();
  flat.f = [](const Point& x) { return cplx(x[0] * x[0] * x[0] * x[0]); };
  try {
    lj_apply(flat, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular_hessian);
  }
}

TEST(OscillatoryIntegral, ZeroAmplitude) {
  auto p = gaussian_phase();
  p.u = [](const Point&) { return cplx(0); };
  EXPECT_EQ(oscillatory_integral(p, 37.0).value, cplx(0));
  const auto fit = expansion_fit(p, geometric_grid(10, 1e3, 6), 1);
  for (auto c : fit.coefficients) EXPECT_LT(std::abs(c), 1e-12);
}

TEST(OscillatoryIntegral, StandardBumpLeadingLaw) {
  // half-width 2: the first correction is (i/2) u''(0) / r = 1/(4r), i.e. 6.25e-4 at r = 400
  PhaseProblem p = gaussian_phase();
  p.u = [](const Point& x) { return cplx(standard_bump(x[0], 2)); };
  p.lo = {-2, -1};
  p.hi = {2, 1};
  const double r = 400;
  const cplx I = oscillatory_integral(p, r).value;
  EXPECT_LT(rel(I, gauss_M0 / std::sqrt(r)), 2e-3);
}

TEST(OscillatoryIntegral, BudgetRefusal) {
  auto p = gaussian_phase();
  OscillatoryOptions opt;
  opt.budget = 1 << 12;
  try {
    oscillatory_integral(p, 1e6, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::budget_exceeded);
  }
}

TEST(OscillatoryIntegral, NonstationaryDecay) {
  PhaseProblem p;
  p.f = [](const Point& x) { return cplx(x[0]); };
  p.u = [](const Point& x) { return cplx(std::exp(-0.5 * (x[0] - 1) * (x[0] - 1))); };
  p.x0 = {1, 0};
  p.lo = {-9, -1};
  p.hi = {11, 1};
  const auto rep = nonstationary_decay(p, geometric_grid(10, 1e4, 13));
  EXPECT_TRUE(rep.holds);
  EXPECT_LT(rep.threshold, 1e4);
}

TEST(OscillatoryIntegral, TwoDimensionalLeadingTerm) {
  PhaseProblem p;
  p.n = 2;
  p.f = [](const Point& x) { return cplx(0.5 * x[0] * x[0] - x[1] * x[1]); };
  p.u = [](const Point& x) { return cplx(flat_top(x[0], 0.5, 1) * flat_top(x[1], 0.5, 1)); };
  const double r = 150;
  const cplx M0 = lj_apply(p, 0);
  EXPECT_LT(rel(oscillatory_integral(p, r).value * r, M0), 1e-3);
}

TEST(ExpansionFit, GaussianPhaseM0) {
  auto p = gaussian_phase();
  const auto fit = expansion_fit(p, geometric_grid(1e3, 1e5, 8), 0);
  EXPECT_LT(rel(fit.coefficients[0], lj_apply(p, 0)), 1e-6);
  EXPECT_DOUBLE_EQ(fit.remainder_exponent, -1.5);
}

TEST(ExpansionFit, CubicM1AndRemainderSlope) {
  auto p = cubic_phase(false);
  const auto grid = geometric_grid(3e4, 3e6, 10);
  const auto fit = expansion_fit(p, grid, 2);
  EXPECT_LT(rel(fit.coefficients[0], lj_apply(p, 0)), 1e-6);
  EXPECT_LT(rel(fit.coefficients[1], lj_apply(p, 1)), 1e-4);
  // subtracting M_0 only leaves an r^{-3/2} remainder
  const double slope = remainder_slope(p, grid, {lj_apply(p, 0)}, fit.integrals);
  EXPECT_LE(slope, -0.5 - 0 - 0.85);
  EXPECT_GT(slope, -1.5 - 0.15);
}

TEST(ExpansionFit, Preconditions) {
  auto p = gaussian_phase();
  EXPECT_THROW(expansion_fit(p, geometric_grid(100, 1000, 8), 1), Error);  // one decade
  EXPECT_THROW(expansion_fit(p, geometric_grid(100, 1e5, 5), 1), Error);   // too few points
}
