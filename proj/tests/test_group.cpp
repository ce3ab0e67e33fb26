#include <gtest/gtest.h>

#include <numbers>

#include "eqres/group.hpp"

using namespace eqres;

namespace {

// Element-wise inner product, independent of the class-sum route in multiplicity().
cplx brute_inner(const CharacterTable& t, std::size_t a, std::size_t b) {
  const auto& g = *t.group;
  cplx s = 0;
  for (std::size_t x = 0; x < g.order(); ++x)
    s += t.irreps[a][g.class_of(x)] * std::conj(t.irreps[b][g.class_of(x)]);
  return s / double(g.order());
}

void expect_valid_table(const GroupPtr& g) {
  const auto t = character_table(g);
  int sum_sq = 0;
  for (int d : t.dims) sum_sq += d * d;
  EXPECT_EQ(sum_sq, static_cast<int>(g->order())) << g->name();
  EXPECT_EQ(t.size(), g->class_count()) << g->name();
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t b = 0; b < t.size(); ++b)
      EXPECT_NEAR(std::abs(brute_inner(t, a, b) - cplx(a == b ? 1.0 : 0.0)), 0.0, 1e-12);
  EXPECT_LT(orthogonality_error(t), 1e-12) << g->name();
}

}  // namespace

TEST(Group, CyclicSmallCases) {
  auto z1 = make_cyclic(1);
  EXPECT_EQ(z1->order(), 1u);
  EXPECT_EQ(z1->class_count(), 1u);

  auto z2 = make_cyclic(2);
  ASSERT_EQ(z2->class_count(), 2u);
  auto t2 = character_table(z2);
  EXPECT_NEAR(std::abs(t2.irreps[0][1] - cplx(1)), 0, 1e-15);
  EXPECT_NEAR(std::abs(t2.irreps[1][1] - cplx(-1)), 0, 1e-15);
  EXPECT_EQ(t2.names[1], "sign");
}

TEST(Group, CyclicFourCharactersArePowersOfI) {
  auto z4 = make_cyclic(4);
  auto t = character_table(z4);
  EXPECT_EQ(z4->class_count(), 4u);
  const cplx I(0, 1);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t k = 0; k < 4; ++k)
      EXPECT_NEAR(std::abs(t.irreps[j][z4->class_of(k)] - std::pow(I, double(j * k))), 0, 1e-12);
}

TEST(Group, CyclicThreeUsesCubeRootsOfUnity) {
  auto t = character_table(make_cyclic(3));
  const cplx w = std::polar(1.0, 2 * std::numbers::pi / 3);
  EXPECT_NEAR(std::abs(t.irreps[1][1] - w), 0, 1e-12);
  EXPECT_NEAR(std::abs(t.irreps[1][2] - w * w), 0, 1e-12);
  EXPECT_NEAR(std::abs(t.irreps[2][1] - w * w), 0, 1e-12);
}

TEST(Group, DihedralThreeClassesAndTable) {
  auto d3 = make_dihedral(3);
  ASSERT_EQ(d3->order(), 6u);
  ASSERT_EQ(d3->class_count(), 3u);
  EXPECT_EQ(d3->classes()[1].elements, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(d3->classes()[2].elements, (std::vector<std::size_t>{3, 4, 5}));
  // s r lies in the class of s
  EXPECT_EQ(d3->class_of(4), d3->class_of(3));
  auto t = character_table(d3);
  EXPECT_EQ(t.dims, (std::vector<int>{1, 1, 2}));
  const double expected[3][3] = {{1, 1, 1}, {1, 1, -1}, {2, -1, 0}};
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(std::abs(t.irreps[i][c] - cplx(expected[i][c])), 0, 1e-12);
}

TEST(Group, DihedralTwoIsKleinFour) {
  auto d2 = make_dihedral(2);
  EXPECT_EQ(d2->class_count(), 4u);
  auto t = character_table(d2);
  for (int d : t.dims) EXPECT_EQ(d, 1);
}

TEST(Group, InvalidParameters) {
  EXPECT_THROW(make_cyclic(0), Error);
  EXPECT_THROW(make_dihedral(1), Error);
  try {
    make_dihedral(0);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_parameter);
  }
}

TEST(Group, UnsupportedFamily) {
  // Z/2 x Z/2 entered as a raw table has no closed-form table here.
  std::vector<std::vector<std::size_t>> t = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  auto g = std::make_shared<const FiniteGroup>(t, std::vector<std::string>{"e", "a", "b", "c"});
  try {
    character_table(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_group);
  }
}

TEST(GroupProperty, AllConstructedGroupsUpToOrder48) {
  for (int N = 1; N <= 48; ++N) {
    auto g = make_cyclic(N);
    EXPECT_TRUE(g->is_associative());
    expect_valid_table(g);
  }
  for (int N = 2; N <= 24; ++N) {
    auto g = make_dihedral(N);
    EXPECT_TRUE(g->is_associative());
    for (std::size_t a = 0; a < g->order(); ++a) {
      EXPECT_EQ(g->mul(a, g->inverse(a)), g->identity());
      EXPECT_EQ(g->mul(g->inverse(a), a), g->identity());
    }
    std::size_t covered = 0;
    for (const auto& c : g->classes()) covered += c.size();
    EXPECT_EQ(covered, g->order());
    expect_valid_table(g);
  }
}

TEST(Multiplicity, RegularAndReflectionDecompositions) {
  auto z2 = make_cyclic(2);
  auto t = character_table(z2);
  ClassFunction regular{{cplx(2), cplx(0)}};
  EXPECT_NEAR(std::abs(multiplicity(regular, t.irreps[0], *z2) - cplx(1)), 0, 1e-15);
  // span{cos k, sin k} under theta -> -theta: character (2, 0) holds each irrep once
  EXPECT_NEAR(std::abs(multiplicity(regular, t.irreps[1], *z2) - cplx(1)), 0, 1e-15);
  EXPECT_EQ(round_multiplicity(cplx(1.0 + 1e-11, 0)).value(), 1);
  EXPECT_FALSE(round_multiplicity(cplx(0.5, 0)).has_value());
  ClassFunction wrong{{cplx(1)}};
  EXPECT_THROW(multiplicity(wrong, t.irreps[0], *z2), Error);
}

TEST(MultiplicityProperty, DimensionWeightedSumRecoversIdentityValue) {
  for (int N = 2; N <= 9; ++N) {
    auto g = make_dihedral(N);
    auto t = character_table(g);
    // Characters of tensor products of irreps are genuine characters.
    for (std::size_t a = 0; a < t.size(); ++a)
      for (std::size_t b = 0; b < t.size(); ++b) {
        ClassFunction chi;
        for (std::size_t c = 0; c < g->class_count(); ++c) chi.values.push_back(t.irreps[a][c] * t.irreps[b][c]);
        cplx total = 0;
        for (std::size_t p = 0; p < t.size(); ++p) {
          const cplx m = multiplicity(chi, t.irreps[p], *g);
          ASSERT_TRUE(round_multiplicity(m).has_value());
          EXPECT_GE(*round_multiplicity(m), 0);
          total += m * double(t.dims[p]);
        }
        EXPECT_NEAR(std::abs(total - chi[g->identity_class()]), 0, 1e-9);
      }
  }
}
