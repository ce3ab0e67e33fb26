#include <gtest/gtest.h>

#include <numbers>

#include "eqres/special.hpp"
#include "eqres/zeta.hpp"

using namespace eqres;
using std::numbers::pi;

namespace {

struct Case {
  std::string name;
  EquivariantSpectrum spec;
};

std::vector<Case> all_cases() {
  std::vector<Case> v;
  v.push_back({"circle-D3", circle_spectrum(circle_dihedral_action(3), 64)});
  v.push_back({"circle-Z4", circle_spectrum(circle_rotation_action(4), 64)});
  v.push_back({"circle-reflection", circle_spectrum(circle_reflection_action(), 64)});
  v.push_back({"torus-swap", torus_spectrum(torus_named_action("swap"), 40)});
  v.push_back({"torus-negation", torus_spectrum(torus_named_action("negation"), 40)});
  v.push_back({"torus-quarter-turn", torus_spectrum(torus_named_action("quarter-turn"), 40)});
  v.push_back({"sphere-Z5", sphere_spectrum(sphere_rotation_action(5), 40)});
  v.push_back({"sphere-reflection", sphere_spectrum(sphere_reflection_action(), 40)});
  return v;
}

int pole_d(const EquivariantSpectrum& s, std::size_t c) { return s.fixed.classes[c].pole_dim(); }

}  // namespace

TEST(HeatTrace, CircleTrivialClosedForm) {
  auto s = circle_spectrum(circle_rotation_action(1), 64);
  const auto h = heat_trace(s, 0, 1.0);
  EXPECT_NEAR(h.value.real(), 2 / (std::numbers::e - 1) + 1, 1e-13);
  EXPECT_NEAR(2 / (std::numbers::e - 1) + 1, 2.16395, 1e-5);
}

TEST(HeatTrace, CircleReflectionIsKernelOnly) {
  auto s = circle_spectrum(circle_reflection_action(), 64);
  for (double t : {1e-4, 1e-2, 0.5, 3.0}) EXPECT_NEAR(std::abs(heat_trace(s, 1, t).value - cplx(1)), 0, 1e-10);
}

TEST(HeatTrace, SphereHalfTurnClosedForm) {
  auto s = sphere_spectrum(sphere_rotation_action(2), 40);
  for (double t : {1e-4, 1e-3, 0.05, 1.0}) {
    const double exact = std::exp(-t / 2) / (1 + std::exp(-t));
    EXPECT_NEAR(heat_trace(s, 1, t).value.real(), exact, 1e-12) << t;
  }
  EXPECT_NEAR(heat_trace(s, 1, 1e-4).value.real(), 0.5, 1e-4);
}

TEST(HeatTrace, IdentityTraceDecreasingPositive) {
  for (auto& c : all_cases()) {
    const auto ser = c.spec.series(c.spec.group->identity_class());
    HeatTrace h(ser, 1e-3);
    double prev = INFINITY;
    for (double t = 1e-3; t < 5; t *= 1.7) {
      const double v = h(t).value.real();
      EXPECT_GT(v, 0) << c.name;
      EXPECT_LT(v, prev) << c.name;
      prev = v;
    }
  }
}

TEST(HeatTrace, TruncationDoublingWithinTailBound) {
  std::vector<std::pair<EquivariantSpectrum, EquivariantSpectrum>> pairs;
  pairs.emplace_back(circle_spectrum(circle_dihedral_action(3), 4000), circle_spectrum(circle_dihedral_action(3), 8000));
  pairs.emplace_back(torus_spectrum(torus_named_action("swap"), 150), torus_spectrum(torus_named_action("swap"), 300));
  pairs.emplace_back(sphere_spectrum(sphere_rotation_action(3), 400), sphere_spectrum(sphere_rotation_action(3), 800));
  for (auto& [a, b] : pairs)
    for (std::size_t c = 0; c < a.class_count(); ++c) {
      HeatTrace ha(a.truncated_series(c), 1e-3), hb(b.truncated_series(c), 1e-3);
      for (double t : {1e-3, 1e-2, 0.1}) EXPECT_LE(std::abs(ha(t).value - hb(t).value), ha.tail_bound(t) + 1e-12);
    }
}

TEST(HeatTrace, RejectsNonPositiveTime) {
  auto s = circle_spectrum(circle_rotation_action(1), 16);
  EXPECT_THROW(heat_trace(s, 0, 0.0), Error);
  EXPECT_THROW(heat_trace(s, 0, -1.0), Error);
}

TEST(ZetaDirect, Examples) {
  auto triv = circle_spectrum(circle_rotation_action(1), 64);
  EXPECT_NEAR(std::abs(zeta_direct(triv, 0, 2.0).value - cplx(pi * pi / 3)), 0, 1e-12);
  auto half = circle_spectrum(circle_rotation_action(2), 64);
  EXPECT_NEAR(std::abs(zeta_direct(half, 1, 1.0).value - cplx(-2 * std::log(2.0))), 0, 1e-12);
  SpectralSeries zero = triv.series(0);
  auto inner = zero.enumerate;
  zero.enumerate = [inner](double L, const TermVisitor& v) { inner(L, [&](double l, cplx) { v(l, 0.0); }); };
  zero.progression.reset();
  EXPECT_EQ(zeta_direct(zero, 3.0, 1).value, cplx(0));
}

TEST(ZetaDirect, OutsideConvergence) {
  auto triv = circle_spectrum(circle_rotation_action(1), 64);
  try {
    zeta_direct(triv, 0, 1.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::outside_convergence);
  }
}

TEST(ZetaDirect, TorusIdentityMatchesLatticeClosedForm) {
  // sum over nonzero k in Z^2 of |k|^{-2w} = 4 zeta(w) beta(w)
  auto s = torus_spectrum(torus_named_action("identity"), 40);
  for (double z : {3.0, 3.5, 4.0}) {
    const double w = z / 2;
    const cplx beta = std::pow(4.0, -w) * (hurwitz_zeta(w, 0.25) - hurwitz_zeta(w, 0.75));
    const cplx exact = 4.0 * riemann_zeta(w) * beta;
    const auto v = zeta_direct(s, 0, z);
    EXPECT_LE(std::abs(v.value - exact), std::max(v.error_estimate, 1e-9)) << z;
    EXPECT_LT(v.error_estimate, 1e-7);
  }
}

TEST(Continuation, CircleTrivialResidue) {
  auto s = circle_spectrum(circle_rotation_action(1), 64);
  auto mz = meromorphic_continue_checked(s.series(0), 1);
  EXPECT_NEAR(std::abs(mz.residue_at(1) - cplx(2)), 0, 1e-6);
  EXPECT_NEAR(std::abs(regular_value_at_zero(mz)), 0, 1e-6);  // 2 zeta_R(0) + 1
}

TEST(Continuation, TorusSwapResidue) {
  auto s = torus_spectrum(torus_named_action("swap"), 40);
  EXPECT_EQ(s.fixed.classes[1].pole_dim(), 1);
  auto mz = meromorphic_continue_checked(s.series(1), 1);
  EXPECT_NEAR(mz.residue_at(1).real(), std::sqrt(2.0), 1e-4);
  EXPECT_NEAR(mz.residue_at(1).imag(), 0, 1e-8);
}

TEST(Continuation, TorusNegationIsEntire) {
  auto s = torus_spectrum(torus_named_action("negation"), 40);
  auto mz = meromorphic_continue_checked(s.series(1), 0);
  for (const auto& p : mz.poles) EXPECT_LT(std::abs(p.residue), 1e-8);
}

TEST(Continuation, RegularValuesAtZero) {
  auto refl = circle_spectrum(circle_reflection_action(), 64);
  EXPECT_NEAR(std::abs(regular_value_at_zero(meromorphic_continue_checked(refl.series(1), 0)) - cplx(1)), 0, 1e-6);
  // 1/(2 cosh(t/2)) = 1/2 - t^2/16 + ...: constant term 1/2
  auto sph = sphere_spectrum(sphere_rotation_action(2), 40);
  EXPECT_NEAR(std::abs(regular_value_at_zero(meromorphic_continue_checked(sph.series(1), 0)) - cplx(0.5)), 0, 1e-6);
}

TEST(Continuation, PoleAtZeroIsReported) {
  // D^{-1} on the circle: 2 zeta_R(z+1) has residue 2 at z = 0
  auto s = circle_spectrum(circle_rotation_action(1), 64);
  auto mz = meromorphic_continue_checked(s.series(0).times_power(-1), 0);
  EXPECT_NEAR(mz.residue_at(0).real(), 2, 1e-6);
  try {
    regular_value_at_zero(mz);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::pole_at_zero);
  }
}

TEST(Continuation, EmptyCosphereClassesHaveNoResidues) {
  for (auto& c : all_cases())
    for (std::size_t k = 0; k < c.spec.class_count(); ++k) {
      if (c.spec.fixed.classes[k].cosphere_fixed_nonempty) continue;
      auto mz = meromorphic_continue_checked(c.spec.series(k), pole_d(c.spec, k));
      for (const auto& p : mz.poles) EXPECT_LT(std::abs(p.residue), 1e-6) << c.name << " class " << k << " s=" << p.s;
    }
}

TEST(Continuation, BogusExponentVanishes) {
  ContinuationOptions opt;
  opt.bogus_exponent = true;
  for (auto& c : all_cases())
    for (std::size_t k = 0; k < c.spec.class_count(); ++k) {
      auto mz = meromorphic_continue_checked(c.spec.series(k), pole_d(c.spec, k), opt);
      ASSERT_TRUE(mz.fit.bogus_coefficient.has_value());
      EXPECT_LE(std::abs(*mz.fit.bogus_coefficient), 1e-6 * mz.fit.leading_scale) << c.name << " class " << k;
    }
}

TEST(Continuation, IdentityLeadingResiduePositive) {
  for (auto& c : all_cases()) {
    const auto e = c.spec.group->identity_class();
    auto mz = meromorphic_continue_checked(c.spec.series(e), c.spec.manifold_dim);
    EXPECT_GT(mz.residue_at(c.spec.manifold_dim).real(), 0) << c.name;
  }
  // Weyl law residues: circle 2, torus 2 pi, sphere 2
  auto t = torus_spectrum(torus_named_action("identity"), 40);
  EXPECT_NEAR(meromorphic_continue_checked(t.series(0), 2).residue_at(2).real(), 2 * pi, 1e-6);
  auto sp = sphere_spectrum(sphere_rotation_action(1), 40);
  EXPECT_NEAR(meromorphic_continue_checked(sp.series(0), 2).residue_at(2).real(), 2, 1e-6);
}

TEST(Continuation, DirectAndContinuedAgree) {
  for (auto& c : all_cases())
    for (std::size_t k = 0; k < c.spec.class_count(); ++k) {
      const int d = pole_d(c.spec, k);
      auto mz = meromorphic_continue_checked(c.spec.series(k), d);
      for (double im : {0.0, 1.5, -4.0}) {
        const cplx z(d + 1.0, im);
        const auto direct = zeta_direct(c.spec, k, z);
        EXPECT_LT(std::abs(mz.regular_value_at(z) - direct.value), 1e-7) << c.name << " class " << k << " z=" << z;
      }
    }
}

TEST(Continuation, ResiduesStableUnderTruncationDoubling) {
  // the series is exact; doubling the requested truncation must not move residues
  for (auto [K1, K2] : {std::pair{64, 128}}) {
    auto a = torus_spectrum(torus_named_action("swap"), K1), b = torus_spectrum(torus_named_action("swap"), K2);
    for (std::size_t k = 0; k < a.class_count(); ++k) {
      auto ma = meromorphic_continue_checked(a.series(k), pole_d(a, k));
      auto mb = meromorphic_continue_checked(b.series(k), pole_d(b, k));
      for (const auto& p : ma.poles) EXPECT_LT(std::abs(p.residue - mb.residue_at(p.s)), 1e-5);
    }
  }
}

TEST(Continuation, UnreliableFitIsFlagged) {
  // a t^{-3/2} term is off the lattice for d = 1
  auto s = sphere_spectrum(sphere_rotation_action(1), 40);
  ContinuationOptions opt;
  auto mz = meromorphic_continue(s.series(0), 0, opt);
  EXPECT_FALSE(mz.fit.reliable);
  EXPECT_TRUE(mz.poles.empty());
  EXPECT_THROW(meromorphic_continue_checked(s.series(0), 0, opt), Error);
}
