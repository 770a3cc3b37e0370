#include <gtest/gtest.h>

#include <numbers>

#include "solitonkit/deformation.hpp"
#include "solitonkit/errors.hpp"
#include "solitonkit/random_fields.hpp"

using namespace solitonkit;
using namespace solitonkit::grid;

namespace {

SolitonPair unit_sphere(int n) { return normalize_einstein(round_sphere_metric(ChartAtlas::sphere(n), 1.0), 1.0); }

void check_slice(const MetricField& g, const ScalarField& f, int samples) {
  const SliceProjector proj(g, f);
  Rng rng(9);
  for (int k = 0; k < samples; ++k) {
    const auto h = random_sym2(g.atlas(), rng, 3, 1.0);
    const auto s = proj.project(h);
    EXPECT_LT(s.divergence, 1e-8);
    EXPECT_LT(proj.project(s.h1).X.max_norm(), 1e-8 * h.max_norm());
    EXPECT_LT(s.orthogonality, 2e-2);
    EXPECT_LT((s.h1 + lie_metric(g, s.X) - h).max_norm(), 1e-10 * h.max_norm());
  }
}

}  // namespace

TEST(Deformation, SliceOnTorus) {
  Rng rng(5);
  const auto at = ChartAtlas::torus(16, 2 * std::numbers::pi, 2 * std::numbers::pi);
  const auto g = random_conformal_metric(at, rng);
  check_slice(g, random_scalar(at, rng, 2, 0.4), 3);
}

TEST(Deformation, SliceOnSphereDeflatesRotations) {
  const auto p = unit_sphere(16);
  check_slice(p.g, p.f, 3);
  EXPECT_EQ(SliceProjector(p.g, p.f).deflated(), 3);
}

TEST(Deformation, SliceFixesLieDerivatives) {
  const auto p = unit_sphere(16);
  Rng rng(2);
  const auto X = random_vector(p.g.atlas(), rng, 2, 1.0);
  const auto s = slice_project(p, lie_metric(p.g, X));
  EXPECT_LT(s.h1.max_norm(), 0.1 * lie_metric(p.g, X).max_norm());
}

TEST(Deformation, EinsteinDeformationsOfSphereVanish) {
  const auto e = compute_E(unit_sphere(16));
  EXPECT_FALSE(e.undecided);
  EXPECT_EQ(e.dimension(), 0);
  EXPECT_GT(e.certificate, 1e3);
}

TEST(Deformation, TraceGapOnSphere) {
  const auto t = trace_spectral_gap(unit_sphere(16));
  EXPECT_NEAR(t.value, 2.0, 5e-2);
  EXPECT_NEAR(t.constant, 1.0, 5e-2);
  EXPECT_TRUE(t.certifies);
}

TEST(Deformation, RefineKernelReportsStability) {
  const auto rk = refine_kernel(unit_sphere, {16, 20}, [](const SolitonPair& p) { return compute_E(p); });
  EXPECT_TRUE(rk.stable);
  EXPECT_EQ(rk.dimensions, (std::vector<int>{0, 0}));
}

TEST(Deformation, NearKernelGap) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(6, 6);
  A(4, 4) = 1e-9;
  A(5, 5) = 1e-10;
  const auto k = near_kernel(A, 1e-3);
  EXPECT_EQ(k.dimension, 2);
  EXPECT_THROW(near_kernel(A, 1.5), PreconditionError);
}
