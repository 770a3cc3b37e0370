#include <gtest/gtest.h>

#include "solitonkit/errors.hpp"
#include "solitonkit/rep_weights.hpp"

using namespace solitonkit;
using namespace solitonkit::rep;

TEST(RepWeights, MultiplicityIsTwo) {
  for (int n = 2; n <= 5; ++n) {
    const auto c = dim_Z_cpn(n);
    EXPECT_EQ(c.hom_multiplicity, 2) << "n=" << n;
    EXPECT_EQ(c.dim_Z, (n + 1) * (n + 1) - 1);
    EXPECT_EQ(c.dim_ker_T, 2 * ((n + 1) * (n + 1) - 1));
  }
}

TEST(RepWeights, ModuleDimensions) {
  EXPECT_EQ(adjoint_module(2).dimension(), 8);
  EXPECT_EQ(isotropy_module(2).dimension(), 4);
  EXPECT_EQ(sym2_dual_isotropy(2).dimension(), 10);
  EXPECT_EQ(adjoint_module(2).multiplicity(Weight{{0, 0}}), 2);
}

TEST(RepWeights, ChargesComeInPairs) {
  for (int n = 2; n <= 4; ++n) {
    const auto m = isotropy_module(n);
    int plus = 0, minus = 0;
    for (const auto& [w, k] : m.weights) (w.charge() > 0 ? plus : minus) += static_cast<int>(k);
    EXPECT_EQ(plus, n);
    EXPECT_EQ(minus, n);
  }
}

TEST(RepWeights, FreudenthalMatchesWeyl) {
  for (const Weight& w : {Weight{{1, 0, -1}}, Weight{{2, 0, 0}}, Weight{{2, 1, 0}}, Weight{{3, 1, -2}}}) {
    const auto irr = irreducible(3, w);
    EXPECT_EQ(irr.dimension(), weyl_dimension(w));
    EXPECT_TRUE(irr.weyl_symmetric());
  }
}

TEST(RepWeights, DecompositionIsIdempotent) {
  const auto m = sym2_dual_isotropy(3);
  KModule rebuilt{"rebuilt", 3, {}};
  for (const auto& s : k_decompose(m))
    for (const auto& [w, k] : irreducible(3, s.highest).weights) rebuilt.add(w, k * s.multiplicity);
  EXPECT_EQ(rebuilt.weights, m.weights);
  const auto again = k_decompose(rebuilt);
  ASSERT_EQ(again.size(), k_decompose(m).size());
}

TEST(RepWeights, HomIsSymmetricAndVanishesOnDisjoint) {
  const auto a = adjoint_module(3), b = sym2_dual_isotropy(3);
  EXPECT_EQ(hom_multiplicity(a, b), hom_multiplicity(b, a));
  EXPECT_EQ(hom_multiplicity(isotropy_module(3), irreducible(3, Weight{{1, 0, -1}})), 0);
}

TEST(RepWeights, RejectsBadInput) {
  KModule lopsided{"x", 2, {}};
  lopsided.add(Weight{{1, 0}});
  EXPECT_THROW(k_decompose(lopsided), PreconditionError);
  EXPECT_THROW(adjoint_module(1), PreconditionError);
  EXPECT_THROW(dim_Z_cpn(1), PreconditionError);
}
