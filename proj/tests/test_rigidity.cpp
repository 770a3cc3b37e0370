#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "solitonkit/errors.hpp"
#include "solitonkit/rigidity.hpp"
#include "oracles.hpp"

using namespace solitonkit;
using namespace solitonkit::rigidity;

TEST(Rigidity, PinchingTable) {
  for (const auto& c : oracles::kPinchTable) {
    const auto r = pinching_test(c.n, make_rational(c.kmin_num, c.kmin_den), make_rational(c.kmax_num, c.kmax_den));
    EXPECT_EQ(r.outcome == Outcome::certifies, c.certifies)
        << "n=" << c.n << " kmin=" << c.kmin_num << "/" << c.kmin_den << " kmax=" << c.kmax_num << "/" << c.kmax_den;
  }
}

TEST(Rigidity, PinchingBoundaryAndMonotonicity) {
  // delta exactly at the floor does not certify: n = 4, floor 1/6.
  EXPECT_EQ(pinching_test(4, make_rational(1, 4), make_rational(3, 2)).outcome, Outcome::fails_to_certify);
  // Raising K_min never turns a certificate off.
  bool seen = false;
  for (int num = 1; num <= 10; ++num) {
    const bool c = pinching_test(4, make_rational(num, 10), Rational(1)).outcome == Outcome::certifies;
    EXPECT_TRUE(!seen || c);
    seen = seen || c;
  }
  EXPECT_EQ(pinching_test(4, Rational(0), Rational(1)).outcome, Outcome::inapplicable);
  EXPECT_THROW(pinching_test(1, Rational(1), Rational(1)), PreconditionError);
  EXPECT_THROW(pinching_test(4, Rational(2), Rational(1)), PreconditionError);
}

TEST(Rigidity, SpectralCriterion) {
  EXPECT_EQ(spectral_Z_equals_E(model::hpn_spectral(2)).outcome, Outcome::certifies);
  EXPECT_EQ(spectral_Z_equals_E(model::cap2_spectral()).outcome, Outcome::certifies);
  EXPECT_EQ(spectral_Z_equals_E(model::round_sphere(2, Rational(1))).outcome, Outcome::fails_to_certify);
  EXPECT_EQ(spectral_Z_equals_E(model::cpn_symbolic(3)).outcome, Outcome::inapplicable);
}

TEST(Rigidity, DiameterClosedForm) {
  const auto d = diameter_functional(model::round_sphere(2, Rational(1)));
  EXPECT_NEAR(d.value, std::numbers::pi, 1e-12);
  EXPECT_NEAR(diameter_threshold(), 2.0 * (std::sqrt(2.0) - 1.0) * std::numbers::pi, 1e-15);
  EXPECT_EQ(diameter_test(model::round_sphere(2, Rational(1))).outcome, Outcome::fails_to_certify);
  EXPECT_NEAR(diameter_functional(model::round_sphere(3, Rational(9))).value, std::numbers::pi * std::sqrt(2.0), 1e-12);
}

TEST(Rigidity, GridDiameterIsScaleInvariant) {
  const auto at = grid::ChartAtlas::sphere(16);
  const double d1 = diameter_functional(grid::round_sphere_metric(at, 1.0)).value;
  const double d4 = diameter_functional(grid::round_sphere_metric(at, 4.0)).value;
  EXPECT_NEAR(d1, d4, 1e-9);
  EXPECT_NEAR(d1, std::numbers::pi, 0.1);
}

TEST(Rigidity, Verdicts) {
  EXPECT_EQ(rank_one_verdict(model::hpn_spectral(2)).overall, Overall::sol_rigid_certified);
  EXPECT_EQ(rank_one_verdict(model::round_sphere(5, Rational(1))).overall, Overall::sol_rigid_certified);
  EXPECT_EQ(rank_one_verdict(model::cpn_symbolic(3)).overall, Overall::undecided);
  EXPECT_THROW(rank_one_verdict(model::flat_torus(2, {Rational(1), Rational(1)})), PreconditionError);
}
