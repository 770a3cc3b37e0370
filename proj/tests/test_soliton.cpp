#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "solitonkit/errors.hpp"
#include "solitonkit/random_fields.hpp"
#include "solitonkit/soliton.hpp"

using namespace solitonkit;
using namespace solitonkit::grid;

namespace {

SolitonPair unit_sphere(int n) { return normalize_einstein(round_sphere_metric(ChartAtlas::sphere(n), 1.0), 1.0); }

}  // namespace

TEST(Soliton, UnitSphereIsNormalizedSoliton) {
  const auto p = unit_sphere(32);
  EXPECT_NEAR(constraint_value(p), 1.0, 1e-6);
  const auto r = residual_S(p);
  EXPECT_LT(std::max(r.s1.max_norm(), r.s2.max_norm()), soliton_tolerance(p));
  EXPECT_NEAR(r.w, std::log(2.0) - 1.0, 5e-3);
  EXPECT_NEAR(shrinking_constant(p), 1.0, 1e-2);
}

TEST(Soliton, NonSolitonIsRejected) {
  const auto at = ChartAtlas::torus(16, 2 * std::numbers::pi, 2 * std::numbers::pi);
  Rng rng(2);
  const SolitonPair p{random_conformal_metric(at, rng, 2, 0.3), random_scalar(at, rng, 2, 0.4), 2};
  EXPECT_THROW(require_soliton(p), PreconditionError);
  EXPECT_THROW(LinearizedS{p}, PreconditionError);
}

TEST(Soliton, BianchiIdentityConverges) {
  std::vector<double> r;
  for (int n : {32, 64}) {
    Rng rng(7);
    const auto at = ChartAtlas::torus(n, 2 * std::numbers::pi, 2 * std::numbers::pi);
    const auto g = random_conformal_metric(at, rng);
    const auto f = random_scalar(at, rng, 2, 0.4);
    r.push_back(bianchi_residual(g, f).max_norm());
  }
  EXPECT_GT(r[0] / r[1], 3.0);
  EXPECT_LT(r[0] / r[1], 5.0);
}

TEST(Soliton, LinearizationMatrixMatchesStencil) {
  const auto c = check_linearization(unit_sphere(24), 3, {1e-3}, 5);
  EXPECT_LT(c.matrix_gap, 1e-10);
  EXPECT_LT(c.samples[0].entropy_slope, 2e-2);
}

TEST(Soliton, TangentDirectionsPreserveConstraint) {
  const auto p = unit_sphere(24);
  Rng rng(4);
  DeformationPair d{random_sym2(p.g.atlas(), rng, 2, 0.5), random_scalar(p.g.atlas(), rng, 2, 0.5)};
  EXPECT_LT(tangency_defect(p, make_tangent(p, d)), 1e-10);
}
