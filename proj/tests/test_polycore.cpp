#include <algorithm>
#include <vector>

#include "gtest/gtest.h"
#include "pmsos/monomial.hpp"
#include "pmsos/polynomial.hpp"

using namespace pmsos;

TEST(Monomial, BasicsAndProduct) {
  Monomial a = Monomial::var(3, 0);
  Monomial b = Monomial::var(3, 2);
  Monomial ab = a * b;
  EXPECT_EQ(ab.degree(), 2);
  EXPECT_EQ(ab.exp, (std::vector<int>{1, 0, 1}));
  EXPECT_TRUE(ab.is_squarefree());
  Monomial sq = a * a;
  EXPECT_FALSE(sq.is_squarefree());
  EXPECT_EQ(sq.squarefree_part().exp, (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(Monomial::one(3).degree(), 0);
}

TEST(Monomial, GrlexOrderIsDegreeThenLex) {
  // Within a degree class, x1-dominant monomials come first.
  std::vector<Monomial> b = monomial_basis(2, 2, false);
  ASSERT_EQ(b.size(), 6u);
  EXPECT_EQ(b[0].exp, (std::vector<int>{0, 0}));
  EXPECT_EQ(b[1].exp, (std::vector<int>{1, 0}));
  EXPECT_EQ(b[2].exp, (std::vector<int>{0, 1}));
  EXPECT_EQ(b[3].exp, (std::vector<int>{2, 0}));
  EXPECT_EQ(b[4].exp, (std::vector<int>{1, 1}));
  EXPECT_EQ(b[5].exp, (std::vector<int>{0, 2}));
  EXPECT_TRUE(std::is_sorted(b.begin(), b.end(), GrlexLess{}));
}

TEST(Monomial, BasisSizesMatchBinomials) {
  EXPECT_EQ(basis_size(2, 2), 6u);   // C(4,2)
  EXPECT_EQ(basis_size(4, 3), 35u);  // C(7,3)
  EXPECT_EQ(basis_size(3, 4), 35u);  // C(7,4)
  EXPECT_EQ(basis_size(1, 7), 8u);
  EXPECT_EQ(monomial_basis(4, 3, false).size(), 35u);
}

TEST(Monomial, SquarefreeBasisCountsSubsets) {
  // Square-free monomials of degree <= 2 in 3 vars: 1 + 3 + 3.
  auto b = monomial_basis(3, 2, true);
  EXPECT_EQ(b.size(), 7u);
  for (const auto& m : b) EXPECT_TRUE(m.is_squarefree());
  // Degree cap at n: asking beyond n adds nothing.
  EXPECT_EQ(monomial_basis(3, 5, true).size(), 8u);  // all subsets of {1,2,3}
}

TEST(MultiPoly, ArithmeticAndEval) {
  MultiPoly x1 = MultiPoly::variable(3, 0);
  MultiPoly x2 = MultiPoly::variable(3, 1);
  MultiPoly f = x1 * x1 + x2 * 3.0 - MultiPoly::constant(3, 2.0);
  EXPECT_EQ(f.degree(), 2);
  EXPECT_EQ(f.nterms(), 3u);
  EXPECT_DOUBLE_EQ(f.eval({2.0, 1.0, 5.0}), 4.0 + 3.0 - 2.0);
  MultiPoly g = f - f;
  EXPECT_TRUE(g.is_zero());
  EXPECT_EQ(g.degree(), -1);
}

TEST(MultiPoly, CancellationPrunesTerms) {
  MultiPoly x1 = MultiPoly::variable(2, 0);
  MultiPoly p = x1 * 1.0;
  p.add_term(Monomial::var(2, 0), -1.0);
  EXPECT_TRUE(p.is_zero());
}

TEST(MultiPoly, PartialDerivative) {
  MultiPoly x1 = MultiPoly::variable(2, 0);
  MultiPoly x2 = MultiPoly::variable(2, 1);
  MultiPoly f = x1 * x1 * x2 * 5.0;  // 5 x1^2 x2
  MultiPoly fx = f.partial(0);       // 10 x1 x2
  EXPECT_DOUBLE_EQ(fx.eval({3.0, 2.0}), 60.0);
  MultiPoly fy = f.partial(1);  // 5 x1^2
  EXPECT_DOUBLE_EQ(fy.eval({3.0, 7.0}), 45.0);
}

TEST(MultiPoly, ReduceBinaryFoldsSquares) {
  MultiPoly x1 = MultiPoly::variable(2, 0);
  MultiPoly f = x1 * x1 * x1 * 2.0 + x1 * (-2.0);  // 2x1^3 - 2x1 -> 0
  EXPECT_TRUE(f.reduce_binary().is_zero());
  MultiPoly x2 = MultiPoly::variable(2, 1);
  MultiPoly g = x1 * x1 * x2 + x2 * x2;  // -> x1 x2 + x2
  MultiPoly r = g.reduce_binary();
  EXPECT_EQ(r.degree(), 2);
  EXPECT_DOUBLE_EQ(r.eval({1.0, 1.0}), 2.0);
  // Agreement with the original on all cube points.
  for (double a : {0.0, 1.0})
    for (double b : {0.0, 1.0})
      EXPECT_DOUBLE_EQ(r.eval({a, b}), g.eval({a, b}));
}

TEST(MultiPoly, CoefNorms) {
  MultiPoly x1 = MultiPoly::variable(2, 0);
  MultiPoly f = x1 * 3.0 - MultiPoly::constant(2, 4.0);
  EXPECT_DOUBLE_EQ(f.coef_norm(), 7.0);
  EXPECT_DOUBLE_EQ(f.coef_max(), 4.0);
}

TEST(MomentIndex, FullModePositions) {
  MomentIndex idx(2, 2, false);
  EXPECT_EQ(idx.size(), 6u);
  EXPECT_EQ(idx.index(Monomial::one(2)), 0u);
  EXPECT_EQ(idx.index(Monomial::var(2, 0)), 1u);
  EXPECT_EQ(idx.index(Monomial::var(2, 0) * Monomial::var(2, 1)), 4u);
  EXPECT_THROW(idx.index(Monomial::var(2, 0) * Monomial::var(2, 0) *
                         Monomial::var(2, 0)),
               std::out_of_range);
}

TEST(MomentIndex, SquarefreeModeAliasesSquares) {
  MomentIndex idx(3, 4, true);
  const Monomial x1 = Monomial::var(3, 0);
  EXPECT_EQ(idx.index(x1 * x1), idx.index(x1));
  EXPECT_EQ(idx.index(x1 * x1 * Monomial::var(3, 1)),
            idx.index(x1 * Monomial::var(3, 1)));
}

TEST(MomentIndex, RieszCollectsCoefficients) {
  MomentIndex idx(2, 2, true);
  MultiPoly x1 = MultiPoly::variable(2, 0);
  MultiPoly f = x1 * x1 * 2.0 + MultiPoly::constant(2, 3.0);  // 2x1^2 + 3
  auto r = idx.riesz(f);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r.at(0), 3.0);
  EXPECT_DOUBLE_EQ(r.at(idx.index(Monomial::var(2, 0))), 2.0);
}
