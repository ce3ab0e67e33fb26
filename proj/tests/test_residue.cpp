#include <gtest/gtest.h>

#include <random>

#include "eqres/residue.hpp"

using namespace eqres;

namespace {

const double sqrt2 = std::numbers::sqrt2;

}  // namespace

TEST(Quantize, IdentityShiftAndDiagonal) {
  const auto I = quantize(CircleSymbol::identity(), 16);
  for (long k = -16; k <= 16; ++k) {
    EXPECT_EQ(I.at(k, k), cplx(1));
    EXPECT_EQ(I.at(k + 1, k), cplx(0));
  }
  FourierPoly e1;
  e1.coeff[1] = 1;
  const auto S = quantize(CircleSymbol::multiplier(e1), 16);
  for (long k = -16; k < 16; ++k) {
    EXPECT_EQ(S.at(k + 1, k), cplx(1));
    EXPECT_EQ(S.at(k, k), cplx(0));
  }
  const auto D = quantize(CircleSymbol::power(1), 16);
  for (long k = -16; k <= 16; ++k) EXPECT_DOUBLE_EQ(D.at(k, k).real(), k == 0 ? 1.0 : double(std::abs(k)));
}

TEST(Quantize, RejectsSmallTruncation) {
  FourierPoly p;
  p.coeff[5] = 1;
  try {
    quantize(CircleSymbol::multiplier(p), 19);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::truncation_too_small);
  }
  EXPECT_NO_THROW(quantize(CircleSymbol::multiplier(p), 20));
}

TEST(CrossProduct, ConjugationIsAGroupAction) {
  std::mt19937 rng(3);
  const auto act = circle_dihedral_action(3);
  const auto A = quantize(random_symbol(rng, 0, 2), 32);
  const auto& G = *act.group;
  for (std::size_t g = 0; g < G.order(); ++g)
    for (std::size_t h = 0; h < G.order(); ++h) {
      const auto lhs = A.conjugated(act.elements[h]).conjugated(act.elements[g]);
      const auto rhs = A.conjugated(act.elements[G.mul(g, h)]);
      for (long k = -32; k <= 32; ++k)
        for (long kp = k - 2; kp <= k + 2; ++kp) ASSERT_LT(std::abs(lhs.at(kp, k) - rhs.at(kp, k)), 1e-12);
    }
}

TEST(CrossProduct, ProductIsAssociative) {
  std::mt19937 rng(5);
  const auto act = circle_dihedral_action(3);
  double s;
  const auto X = random_element(rng, act, 64, s), Y = random_element(rng, act, 64, s),
             Z = random_element(rng, act, 64, s);
  const auto L = (X * Y) * Z, R = X * (Y * Z);
  for (const auto& [g, A] : L.parts) {
    const auto& B = R.parts.at(g);
    for (long k = -A.valid(); k <= A.valid(); ++k)
      for (long kp = k - A.band(); kp <= k + A.band(); ++kp) {
        if (std::abs(kp) > A.valid()) continue;
        ASSERT_LT(std::abs(A.at(kp, k) - B.at(kp, k)), 1e-9 * (1 + std::abs(A.at(kp, k))));
      }
  }
}

TEST(TauG, CircleExamples) {
  const auto act = circle_dihedral_action(3);
  const auto Dm1 = quantize(CircleSymbol::power(-1), 512);
  EXPECT_NEAR(tau_g(act, 0, Dm1).value.real(), 2.0, 1e-6);
  // rotation: empty cosphere fixed set
  EXPECT_LT(std::abs(tau_g(act, 1, quantize(CircleSymbol::identity(), 512)).value), 1e-6);
  EXPECT_LT(std::abs(tau_g(act, 1, Dm1).value), 1e-6);
  const auto e = CrossProductElement::single(act, 0, quantize(CircleSymbol::identity(), 512));
  EXPECT_LT(std::abs(trace_on_class(e, act.group->identity_class())), 1e-6);
}

TEST(TauG, TorusSwapClosedForms) {
  const auto spec = torus_spectrum(torus_named_action("swap"), 400);
  const std::size_t swap_cls = spec.group->class_of(1);
  EXPECT_LT(std::abs(tau_g(spec, swap_cls, 0).value), 1e-6);
  EXPECT_NEAR(tau_g(spec, swap_cls, -1).value.real(), sqrt2, 1e-6);
  const auto act = torus_named_action("swap");
  EXPECT_NEAR(tau_g(act, 1, TorusOperator::power(-1)).value.real(), sqrt2, 1e-6);
  EXPECT_LT(std::abs(tau_g(act, 1, TorusOperator::power(0)).value), 1e-6);
}

TEST(TauG, EmptyCosphereClassesVanish) {
  std::mt19937 rng(11);
  const auto act = circle_rotation_action(5);
  for (std::size_t g = 1; g < 5; ++g)
    for (int order : {-1, 0, 1}) {
      const auto A = quantize(random_symbol(rng, order, 3), 512);
      EXPECT_LT(std::abs(tau_g(act, g, A).value), 1e-6) << g << " " << order;
    }
  const auto refl = circle_reflection_action();
  const auto A = quantize(random_symbol(rng, 1, 3), 512);
  EXPECT_LT(std::abs(tau_g(refl, 1, A).value), 1e-6);
  EXPECT_LT(std::abs(tau_g(torus_named_action("negation"), 1, TorusOperator::power(-1)).value), 1e-6);
}

TEST(TauG, ZeroElementGivesZero) {
  const auto act = circle_dihedral_action(3);
  const auto Z = quantize(CircleSymbol::power(-1), 64) - quantize(CircleSymbol::power(-1), 64);
  const auto X = CrossProductElement::single(act, 0, Z);
  EXPECT_EQ(trace_on_class(X, 0), cplx(0));
  EXPECT_EQ(trace_on_class(CrossProductElement(act), 0), cplx(0));
}

TEST(TraceProperty, RandomCommutatorsVanish) {
  std::mt19937 rng(2024);
  const auto act = circle_dihedral_action(3);
  const long K = 512;
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    double sx, sy;
    const auto X = random_element(rng, act, K, sx);
    const auto Y = random_element(rng, act, K, sy);
    const auto C = commutator(X, Y);
    for (std::size_t c = 0; c < act.group->class_count(); ++c) {
      const double v = std::abs(trace_on_class(C, c));
      worst = std::max(worst, v / std::max(1.0, sx * sy));
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Invariants, DIndependence) {
  const auto act = circle_dihedral_action(3);
  const auto Dm1 = quantize(CircleSymbol::power(-1), 2048);
  EXPECT_NEAR(std::abs(tau_g(act, 0, Dm1, DChoice::perturbed).value - tau_g(act, 0, Dm1).value), 0.0, 1e-5);
  std::mt19937 rng(8);
  const auto A = quantize(random_symbol(rng, -1, 2), 2048);
  EXPECT_NEAR(std::abs(tau_g(act, 0, A, DChoice::perturbed).value - tau_g(act, 0, A).value), 0.0, 1e-5);
  const auto sw = torus_named_action("swap");
  EXPECT_NEAR(std::abs(tau_g(sw, 1, TorusOperator::power(-1), DChoice::perturbed).value - sqrt2), 0.0, 1e-5);
}

TEST(Invariants, DescentIgnoresSmoothingPerturbations) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto act = circle_dihedral_action(3);
  const auto A = quantize(random_symbol(rng, 0, 2), 512);
  QuantizedOperator S(512, 2, -100);
  for (long k = -6; k <= 6; ++k)
    for (long kp = std::max(-6L, k - 2); kp <= std::min(6L, k + 2); ++kp) S.set(kp, k, cplx(u(rng), u(rng)));
  for (std::size_t g : {0, 3}) {
    const auto base = tau_g(act, g, A).value;
    EXPECT_LT(std::abs(tau_g(act, g, A + S).value - base), 1e-6) << g;
  }
}

TEST(Invariants, NontrivialOnFixedCosphere) {
  const auto act = circle_reflection_action();
  EXPECT_GT(std::abs(tau_g(act, 0, quantize(CircleSymbol::power(-1), 512)).value), 1.0);
  EXPECT_GT(std::abs(tau_g(torus_named_action("swap"), 1, TorusOperator::power(-1)).value), 1.0);
}

TEST(TauPi, Examples) {
  const auto triv = circle_rotation_action(1);
  const auto tt = character_table(triv.group);
  const auto X = CrossProductElement::single(triv, 0, quantize(CircleSymbol::power(-1), 512));
  EXPECT_NEAR(tau_pi(X, tt.irreps[0]).real(), 2.0, 1e-6);

  const auto sw = torus_named_action("swap");
  const auto ct = character_table(sw.group);
  TorusCrossElement Y{sw, {{1, TorusOperator::power(-1)}}};
  EXPECT_NEAR(tau_pi(Y, ct.irreps[ct.find("sign")]).real(), -0.5 * sqrt2, 1e-6);

  const auto rot = circle_rotation_action(4);
  const auto rt = character_table(rot.group);
  CrossProductElement R(rot);
  for (std::size_t g = 1; g < 4; ++g) R.parts.emplace(g, quantize(CircleSymbol::power(-1), 512));
  for (std::size_t i = 0; i < rt.size(); ++i) EXPECT_LT(std::abs(tau_pi(R, rt.irreps[i])), 1e-6);
}

TEST(TauG, DoublingRefusesUnstableBuilders) {
  const auto act = circle_reflection_action();
  auto good = [](long K) { return quantize(CircleSymbol::power(-1), K); };
  EXPECT_NEAR(tau_g_converged(act, 0, good, 512).value.real(), 2.0, 1e-6);
  // a K-dependent normalization is not a fixed operator
  auto drifting = [](long K) { return (1.0 + 1.0 / double(K)) * quantize(CircleSymbol::power(-1), K); };
  try {
    tau_g_converged(act, 0, drifting, 512);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::truncation_insufficient);
  }
}

TEST(LocalResidue, CircleIdentity) {
  EXPECT_NEAR(local_residue_W(CircleSymbol::power(-1)).value.real(), 2.0, 1e-12);
  std::mt19937 rng(17);
  const auto sym = random_symbol(rng, 0, 3);
  const auto W = local_residue_W(sym).value;
  const auto tau = tau_g(circle_reflection_action(), 0, quantize(sym, 512)).value;
  EXPECT_LT(std::abs(W - tau), 1e-6);
}

TEST(LocalResidue, CalibrationAndCrossValidation) {
  const auto cal = calibrate_local_residue();
  EXPECT_NEAR(cal.C, 1.0, 1e-8);
  EXPECT_NEAR(cal.spectral.real(), sqrt2, 1e-6);
  TorusOperator A{{{-1, {{{0, 0}, 1.0}, {{1, -1}, 0.5}, {{-1, 1}, 0.5}}}}};
  const auto W = local_residue_W(A, 0, cal.C).value;
  const auto tau = tau_g(torus_named_action("swap"), 1, A).value;
  EXPECT_NEAR(W.real(), 2 * sqrt2, 1e-8);
  EXPECT_LT(std::abs(W - tau), 1e-3);
  // a multiplier that oscillates along the diagonal integrates out on both routes
  TorusOperator B{{{-1, {{{0, 0}, 1.0}, {{1, 1}, 0.7}, {{1, -1}, cplx(0, 0.4)}, {{-1, 1}, cplx(0, -0.4)}}}}};
  EXPECT_LT(std::abs(local_residue_W(B, 1, cal.C).value - tau_g(torus_named_action("swap"), 1, B).value), 1e-3);
}

TEST(LocalResidue, CoordinateShiftInvariance) {
  std::mt19937 rng(19);
  const auto sym = random_symbol(rng, 0, 3);
  for (double c : {0.3, 1.7, -2.9}) {
    EXPECT_LT(std::abs(local_residue_W(sym.shifted(c)).value - local_residue_W(sym).value), 1e-8);
  }
  TorusOperator A{{{-1, {{{0, 0}, 1.0}, {{1, -1}, 0.5}, {{-1, 1}, 0.5}, {{2, 0}, 0.3}}}}};
  for (double c : {0.3, 1.7}) {
    EXPECT_LT(std::abs(local_residue_W(A.shifted(c, c)).value - local_residue_W(A).value), 1e-8);
  }
}

TEST(LocalResidue, VanishingPrincipalSymbol) {
  CircleSymbol a;
  a.order = -1;
  a.components.push_back({FourierPoly{}, FourierPoly{}});
  EXPECT_EQ(local_residue_W(a).value, cplx(0));
  TorusOperator z{{{-1, {{{0, 0}, 0.0}}}}};
  EXPECT_EQ(local_residue_W(z).value, cplx(0));
}
