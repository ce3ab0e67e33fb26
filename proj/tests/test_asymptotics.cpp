#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eqres/asymptotics.hpp"

using namespace eqres;

namespace {

const double sqrt2 = std::numbers::sqrt2;

ClassFunction irrep(const EquivariantSpectrum& s, const std::string& name) {
  const auto t = character_table(s.group);
  return t.irreps[t.find(name)];
}

}  // namespace

TEST(Counting, CircleReflectionClosedForms) {
  const auto s = circle_spectrum(circle_reflection_action(), 1000);
  const auto triv = counting_function(s, "trivial", 1000), sign = counting_function(s, "sign", 1000);
  for (double l : {0.0, 0.5, 1.0, 2.5, 17.0, 999.9, 1000.0}) {
    EXPECT_EQ(triv(l), long(std::floor(l)) + 1) << l;
    EXPECT_EQ(sign(l), long(std::floor(l))) << l;
  }
  EXPECT_EQ(triv(-1.0), 0);
  EXPECT_EQ(sign(0.5), 0);
  EXPECT_TRUE(triv.nondecreasing());
}

TEST(Counting, BelowFirstEigenvalueNontrivialIsZero) {
  const auto s = torus_spectrum(torus_named_action("swap"), 20);
  EXPECT_EQ(counting_function(s, "sign", 0.9)(0.9), 0);
  const auto c = counting_function(s, "sign", 0.9);
  EXPECT_EQ(c(0.0), 0);
}

TEST(Counting, DecompositionIsExact) {
  EXPECT_EQ(decomposition_defect(circle_spectrum(circle_dihedral_action(3), 500), 500), 0);
  EXPECT_EQ(decomposition_defect(circle_spectrum(circle_rotation_action(4), 500), 500), 0);
  EXPECT_EQ(decomposition_defect(torus_spectrum(torus_named_action("swap"), 60), 60), 0);
  EXPECT_EQ(decomposition_defect(torus_spectrum(torus_named_action("negation"), 60), 60), 0);
  EXPECT_EQ(decomposition_defect(sphere_spectrum(sphere_rotation_action(2), 80), 80), 0);
}

TEST(Counting, BeyondCoverageRejected) {
  const auto s = circle_spectrum(circle_reflection_action(), 100);
  try {
    counting_function(s, "trivial", 200);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::truncation_too_small);
  }
}

TEST(Weyl, CircleConstants) {
  const auto triv = circle_spectrum(circle_rotation_action(1), 1000);
  EXPECT_NEAR(weyl_fit(counting_function(triv, "trivial", 1000), 1, 1).constant, 2.0, 0.02);
  const auto d1 = circle_spectrum(circle_reflection_action(), 1000);
  EXPECT_NEAR(weyl_fit(counting_function(d1, "trivial", 1000), 1, 1).constant, 1.0, 0.01);
  EXPECT_NEAR(weyl_fit(counting_function(d1, "sign", 1000), 1, 1).constant, 1.0, 0.01);
}

TEST(Weyl, TorusSwapIrrepsAgree) {
  const auto s = torus_spectrum(torus_named_action("swap"), 200);
  const auto t = weyl_fit(counting_function(s, "trivial", 200), 2, 1);
  const auto g = weyl_fit(counting_function(s, "sign", 200), 2, 1);
  EXPECT_LT(std::abs(t.per_dimension - g.per_dimension) / t.per_dimension, 0.02);
  EXPECT_NEAR(t.per_dimension, std::numbers::pi / 2, 0.02 * std::numbers::pi / 2);
  EXPECT_NEAR(g.per_dimension, std::numbers::pi / 2, 0.02 * std::numbers::pi / 2);
}

TEST(Weyl, TooFewPoints) {
  const auto s = circle_spectrum(circle_reflection_action(), 100);
  try {
    weyl_fit(counting_function(s, "trivial", 50), 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::too_few_points);
  }
}

TEST(Relative, TorusSwapDiagonalCount) {
  const auto s = torus_spectrum(torus_named_action("swap"), 200);
  const auto R = relative_counting(s, "trivial", "sign", 200);
  // the constant mode is swap-invariant and counts toward the trivial irrep
  for (double l : {0.0, 1.0, 1.5, 10.0, 77.7, 200.0}) EXPECT_EQ(R.difference(l), 1 + 2 * long(std::floor(l / sqrt2))) << l;
  EXPECT_EQ(R.k, 1);
  EXPECT_NEAR(R.fit.constant, sqrt2, 0.02 * sqrt2);
  ASSERT_TRUE(R.fit.loglog_slope.has_value());
  EXPECT_NEAR(*R.fit.loglog_slope, 1.0, 0.05);
  EXPECT_EQ(R.dominance_violations, 0);
  EXPECT_TRUE(R.warnings.empty());
}

TEST(Relative, CircleHalfTurnIsBounded) {
  const auto s = circle_spectrum(circle_rotation_action(2), 1000);
  const auto R = relative_counting(s, "trivial", "sign", 1000);
  EXPECT_EQ(R.k, -1);
  for (long v : R.difference.cumulative) EXPECT_LE(std::abs(v), 2);
  EXPECT_GT(R.sign_changes, 0);
  EXPECT_GT(R.dominance_violations, 0);
  // difference / lambda^eps decays
  EXPECT_LT(std::abs(R.fit.convergence_series.back().second), 1.0);
}

TEST(Relative, EqualIrrepsVanish) {
  const auto s = circle_spectrum(circle_dihedral_action(3), 300);
  const auto R = relative_counting(s, "rho1", "rho1", 300);
  for (long v : R.difference.cumulative) EXPECT_EQ(v, 0);
  EXPECT_EQ(R.k, -1);
}

TEST(Relative, DimensionMismatchWarns) {
  const auto s = circle_spectrum(circle_dihedral_action(3), 300);
  const auto R = relative_counting(s, "trivial", "rho1", 300);
  ASSERT_FALSE(R.warnings.empty());
  EXPECT_NE(R.warnings.front().find("hypothesis-violation"), std::string::npos);
}

TEST(Tauberian, CircleTrivial) {
  const auto s = circle_spectrum(circle_rotation_action(1), 100000);
  const auto pi = irrep(s, "trivial");
  const cplx A = pi_zeta_residue(s, pi, 1.0);
  EXPECT_NEAR(A.real(), 2.0, 1e-6);
  const auto r = tauberian_check(1.0, A, counting_function(s, pi, 100000));
  EXPECT_LT(r.deviation, 0.02);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.vanishes_below_one);
}

TEST(Tauberian, TorusSwapDifference) {
  const auto s = torus_spectrum(torus_named_action("swap"), 200);
  const auto swap = s.group->class_of(1);
  const cplx A = meromorphic_continue_checked(s.series(swap), 1).residue_at(1.0);
  EXPECT_NEAR(A.real(), sqrt2, 1e-4);
  const auto R = relative_counting(s, "trivial", "sign", 200);
  const auto r = tauberian_check(1.0, A, R.difference);
  EXPECT_LT(r.deviation, 0.02);
  EXPECT_TRUE(r.monotone);
}

TEST(Tauberian, ZeroFunction) {
  const auto s = circle_spectrum(circle_dihedral_action(3), 300);
  const auto R = relative_counting(s, "rho1", "rho1", 300);
  const auto r = tauberian_check(1.0, 0.0, R.difference);
  EXPECT_EQ(r.slope, 0.0);
  EXPECT_EQ(r.deviation, 0.0);
}

TEST(Tauberian, TorusIdentityRescaled) {
  const auto s = torus_spectrum(torus_action({1, 0, 0, 1}, "trivial"), 200);
  const cplx A = meromorphic_continue_checked(s.series(0), 2).residue_at(2.0);
  EXPECT_NEAR(A.real(), 2 * std::numbers::pi, 1e-4);
  const auto r = tauberian_check(2.0, A, counting_function(s, "trivial", 200));
  EXPECT_LT(r.deviation, 0.02);
}

TEST(Faithful, DihedralIrrepsHaveLeadingPole) {
  const auto s = circle_spectrum(circle_dihedral_action(3), 2000);
  const auto t = character_table(s.group);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const cplx A = pi_zeta_residue(s, t.irreps[i], 1.0);
    EXPECT_GT(A.real(), 0.1) << t.names[i];
    EXPECT_LT(std::abs(A.imag()), 1e-9);
  }
}

TEST(Faithful, TrivialActionSignHasNoPole) {
  const auto s = circle_spectrum(circle_rotation_action(2, 0), 2000);
  EXPECT_LT(std::abs(pi_zeta_residue(s, irrep(s, "sign"), 1.0)), 1e-6);
  EXPECT_NEAR(pi_zeta_residue(s, irrep(s, "trivial"), 1.0).real(), 2.0, 1e-6);
}

TEST(Dixmier, CircleIdentity) {
  const auto s = circle_spectrum(circle_rotation_action(1), 500000);
  const auto r = dixmier_partial(s, irrep(s, "trivial"), 1000000);
  EXPECT_NEAR(r.limit, 2.0, 0.04);
  EXPECT_LT(r.spread, 0.03);
  EXPECT_EQ(r.ratios.back().first, 1000000);
}

TEST(Dixmier, ReflectionTrivialIrrep) {
  const auto s = circle_spectrum(circle_reflection_action(), 1000000);
  const auto r = dixmier_partial(s, irrep(s, "trivial"), 1000000);
  EXPECT_NEAR(r.limit, 1.0, 0.02);
  EXPECT_LT(r.spread, 0.03);
}

TEST(Dixmier, ZeroSequence) {
  const auto r = dixmier_partial(std::vector<double>(5000, 0.0), 5000);
  EXPECT_EQ(r.limit, 0.0);
  const auto s = circle_spectrum(circle_rotation_action(2, 0), 2000);
  EXPECT_EQ(dixmier_partial(s, irrep(s, "sign"), 2000).limit, 0.0);
}

TEST(Dixmier, TooFewTerms) {
  try {
    dixmier_partial(std::vector<double>(500, 1.0), 500);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::too_few_terms);
  }
}
