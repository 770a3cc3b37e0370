#include "solitonkit/field.hpp"

#include <sstream>

namespace solitonkit::grid {

MetricField::MetricField(Sym2Field g) : g_(std::move(g)) {
  const auto& atlas = *g_.atlas();
  for (int nd = 0; nd < atlas.node_count(); ++nd) {
    if (!atlas.owned(nd) && atlas.blend(nd) <= 0.0) continue;
    const double a = g_.sym(nd, 0, 0), b = g_.sym(nd, 0, 1), d = g_.sym(nd, 1, 1);
    // Smallest eigenvalue of [[a, b], [b, d]].
    const double lmin = 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    if (!(lmin > 0.0)) {
      std::ostringstream os;
      os << "metric is not positive definite at chart " << atlas.chart_of(nd) << " node (" << atlas.index_i(nd)
         << ", " << atlas.index_j(nd) << "), smallest eigenvalue " << lmin;
      throw PreconditionError(os.str());
    }
  }
}

ScalarField constant_scalar(AtlasPtr atlas, double value) {
  return ScalarField::sample(std::move(atlas), [&](int) { return ScalarField::Components{value}; });
}

MetricField flat_metric(AtlasPtr atlas) {
  return MetricField(Sym2Field::sample(std::move(atlas), [](int) { return Sym2Field::Components{1.0, 0.0, 1.0}; }));
}

MetricField conformal_metric(const ScalarField& phi) {
  return MetricField(Sym2Field::sample(phi.atlas(), [&](int nd) {
    const double e = std::exp(2.0 * phi(nd, 0));
    return Sym2Field::Components{e, 0.0, e};
  }));
}

MetricField round_sphere_metric(AtlasPtr atlas, double radius_sq) {
  if (atlas->kind() != AtlasKind::sphere) throw PreconditionError("round_sphere_metric: needs the sphere atlas");
  auto a = atlas;
  return MetricField(Sym2Field::sample(std::move(atlas), [&](int nd) {
    const Vec2 w = a->coordinate(nd);
    const double D = 1.0 + w[0] * w[0] + w[1] * w[1];
    const double c = 4.0 * radius_sq / (D * D);
    return Sym2Field::Components{c, 0.0, c};
  }));
}

ScalarField ambient_coordinate(AtlasPtr atlas, int i) {
  auto a = atlas;
  return ScalarField::sample(std::move(atlas), [&](int nd) { return ScalarField::Components{a->embedding(nd)[i]}; });
}

}  // namespace solitonkit::grid
