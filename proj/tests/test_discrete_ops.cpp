#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>

#include "solitonkit/curvature.hpp"
#include "solitonkit/field_io.hpp"
#include "solitonkit/op_cache.hpp"
#include "solitonkit/operators.hpp"
#include "solitonkit/random_fields.hpp"

using namespace solitonkit;
using namespace solitonkit::grid;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("solitonkit_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(DiscreteOps, SphereCurvatureConverges) {
  double prev_s = 0, prev_sym = 0;
  for (int n : {32, 64}) {
    for (double r2 : {1.0, 4.0}) {
      const auto pack = curvature_pack(round_sphere_metric(ChartAtlas::sphere(n), r2));
      const double e = (pack.scalar - constant_scalar(pack.atlas, 2.0 / r2)).max_norm() * r2;
      const double sym = riemann_symmetry_defect(pack);
      if (r2 == 1.0) {
        if (prev_s > 0) {
          EXPECT_GT(prev_s / e, 3.0);
          EXPECT_GT(prev_sym / sym, 3.0);
        }
        prev_s = e;
        prev_sym = sym;
      } else {
        EXPECT_NEAR(e, prev_s, 1e-9);
      }
    }
  }
  EXPECT_LT(prev_s, 2e-2);
}

TEST(DiscreteOps, FlatTorusHasNoCurvature) {
  const auto pack = curvature_pack(flat_metric(ChartAtlas::torus(16, 2 * std::numbers::pi, 2 * std::numbers::pi)));
  EXPECT_LT(pack.scalar.max_norm(), 1e-12);
}

TEST(DiscreteOps, SphereAreaAndCoordinateEigenfunction) {
  const auto at = ChartAtlas::sphere(32);
  const auto g = round_sphere_metric(at, 1.0);
  EXPECT_NEAR(integrate(g, constant_scalar(at, 1.0)), 4 * std::numbers::pi, 1e-3);
  const auto x = ambient_coordinate(at, 2);
  const auto r = laplace(g, x) + 2.0 * x;
  EXPECT_LT(r.max_norm(), 3e-2);
}

TEST(DiscreteOps, LaplacianConvergesAtSecondOrder) {
  double prev = 0;
  for (int n : {32, 64}) {
    const auto at = ChartAtlas::sphere(n);
    const auto x = ambient_coordinate(at, 0);
    const double e = (laplace(round_sphere_metric(at, 1.0), x) + 2.0 * x).max_norm();
    if (prev > 0) EXPECT_GT(prev / e, 3.0);
    prev = e;
  }
}

TEST(DiscreteOps, TwistedLaplacianSymmetryDefectConverges) {
  std::vector<double> d;
  for (int n : {16, 32}) {
    const auto at = ChartAtlas::torus(n, 2 * std::numbers::pi, 2 * std::numbers::pi);
    Rng rng(3);
    const auto g = random_conformal_metric(at, rng);
    const auto f = random_scalar(at, rng, 2, 0.4);
    const auto geo = make_geometry(g, f);
    const auto L = assemble("lap_f", op_laplace(geo, true), InnerProduct::twisted);
    const auto M = mass_matrix(*geo, FieldKind::scalar, true);
    d.push_back(L.symmetry_defect(M, random_scalar(at, rng, 2).dofs(), random_scalar(at, rng, 2).dofs()));
  }
  EXPECT_GT(d[0] / d[1], 3.0);
}

TEST(DiscreteOps, FieldRoundTrip) {
  const auto dir = temp_dir("io");
  const auto at = ChartAtlas::sphere(16);
  Rng rng(1);
  const auto h = random_sym2(at, rng);
  const auto path = (dir / "h.skf").string();
  write_field(path, h);
  const auto back = read_field<FieldKind::sym2>(path);
  EXPECT_EQ((back - h).max_norm(), 0.0);
  EXPECT_EQ(peek_field(path).kind, FieldKind::sym2);
  EXPECT_THROW(read_field<FieldKind::scalar>(path), std::exception);
}

TEST(DiscreteOps, OperatorCacheHitsOnSecondLookup) {
  const auto dir = temp_dir("cache");
  const auto at = ChartAtlas::torus(12, 2 * std::numbers::pi, 2 * std::numbers::pi);
  const auto g = flat_metric(at);
  const auto f = constant_scalar(at, 0.0);
  const auto key = operator_key("lap_f", g, f);
  EXPECT_EQ(key, operator_key("lap_f", g, f));
  EXPECT_NE(key, operator_key("lap", g, f));
  const auto build = [&] { return op_laplace(make_geometry(g, f), true).matrix(); };
  OperatorCache cache(dir.string());
  const auto a = cache.get_or_build(key, build);
  const auto b = cache.get_or_build(key, build);
  EXPECT_EQ(cache.misses(), 1);
  EXPECT_EQ(cache.hits(), 1);
  EXPECT_EQ(SparseMatrix(a - b).norm(), 0.0);
}
