#include "solitonkit/random_fields.hpp"

#include <cmath>
#include <vector>

namespace solitonkit::grid {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct TrigSeries {
  struct Mode {
    int kx, ky;
    double a, b;
  };
  std::vector<Mode> modes;
  double lx = 1.0, ly = 1.0;

  double operator()(const Vec2& x) const {
    double s = 0.0;
    for (const auto& m : modes) {
      const double ph = kTwoPi * (m.kx * x[0] / lx + m.ky * x[1] / ly);
      s += m.a * std::cos(ph) + m.b * std::sin(ph);
    }
    return s;
  }
};

TrigSeries make_trig(const ChartAtlas& atlas, Rng& rng, int bandlimit, double amplitude) {
  std::normal_distribution<double> nd(0.0, 1.0);
  TrigSeries t;
  const auto& ch = atlas.chart(0);
  t.lx = ch.hi[0] - ch.lo[0];
  t.ly = ch.hi[1] - ch.lo[1];
  for (int kx = 0; kx <= bandlimit; ++kx)
    for (int ky = -bandlimit; ky <= bandlimit; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      const double damp = amplitude / (1.0 + kx * kx + ky * ky);
      const double a = nd(rng), b = nd(rng);
      t.modes.push_back({kx, ky, damp * a, damp * b});
    }
  // Mean term.
  t.modes.push_back({0, 0, amplitude * nd(rng), 0.0});
  return t;
}

struct AmbientPoly {
  struct Term {
    int i, j, k;
    double c;
  };
  std::vector<Term> terms;
  double operator()(const std::array<double, 3>& X) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.c * std::pow(X[0], t.i) * std::pow(X[1], t.j) * std::pow(X[2], t.k);
    return s;
  }
};

AmbientPoly make_poly(Rng& rng, int degree, double amplitude) {
  std::normal_distribution<double> nd(0.0, 1.0);
  AmbientPoly p;
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j)
      for (int k = 0; i + j + k <= degree; ++k)
        p.terms.push_back({i, j, k, amplitude * nd(rng) / (1.0 + i + j + k)});
  return p;
}

}  // namespace

ScalarField random_scalar(AtlasPtr atlas, Rng& rng, int bandlimit, double amplitude) {
  if (atlas->kind() == AtlasKind::torus) {
    const auto t = make_trig(*atlas, rng, bandlimit, amplitude);
    const auto a = atlas;
    return ScalarField::sample(atlas, [&](int nd) { return ScalarField::Components{t(a->coordinate(nd))}; });
  }
  const auto p = make_poly(rng, bandlimit, amplitude);
  const auto a = atlas;
  return ScalarField::sample(atlas, [&](int nd) { return ScalarField::Components{p(a->embedding(nd))}; });
}

CovectorField random_covector(AtlasPtr atlas, Rng& rng, int bandlimit, double amplitude) {
  const auto a = atlas;
  if (atlas->kind() == AtlasKind::torus) {
    const auto t0 = make_trig(*atlas, rng, bandlimit, amplitude);
    const auto t1 = make_trig(*atlas, rng, bandlimit, amplitude);
    return CovectorField::sample(atlas, [&](int nd) {
      const Vec2 x = a->coordinate(nd);
      return CovectorField::Components{t0(x), t1(x)};
    });
  }
  const AmbientPoly V[3] = {make_poly(rng, bandlimit, amplitude), make_poly(rng, bandlimit, amplitude),
                            make_poly(rng, bandlimit, amplitude)};
  return CovectorField::sample(atlas, [&](int nd) {
    const auto X = a->embedding(nd);
    const auto J = a->embedding_jacobian(nd);
    CovectorField::Components w{};
    for (int i = 0; i < 3; ++i) {
      const double v = V[i](X);
      for (int c = 0; c < 2; ++c) w[c] += v * J[i][c];
    }
    return w;
  });
}

VectorField random_vector(AtlasPtr atlas, Rng& rng, int bandlimit, double amplitude) {
  const auto w = random_covector(atlas, rng, bandlimit, amplitude);
  const auto a = atlas;
  if (atlas->kind() == AtlasKind::torus)
    return VectorField::sample(atlas, [&](int nd) { return VectorField::Components{w(nd, 0), w(nd, 1)}; });
  // Raise with the unit-sphere metric so the result is a genuine tangent field.
  return VectorField::sample(atlas, [&](int nd) {
    const auto J = a->embedding_jacobian(nd);
    double g[2][2] = {};
    for (int i = 0; i < 3; ++i)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) g[p][q] += J[i][p] * J[i][q];
    const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    return VectorField::Components{(g[1][1] * w(nd, 0) - g[0][1] * w(nd, 1)) / det,
                                   (-g[1][0] * w(nd, 0) + g[0][0] * w(nd, 1)) / det};
  });
}

Sym2Field random_sym2(AtlasPtr atlas, Rng& rng, int bandlimit, double amplitude) {
  const auto a = atlas;
  if (atlas->kind() == AtlasKind::torus) {
    const auto t0 = make_trig(*atlas, rng, bandlimit, amplitude);
    const auto t1 = make_trig(*atlas, rng, bandlimit, amplitude);
    const auto t2 = make_trig(*atlas, rng, bandlimit, amplitude);
    return Sym2Field::sample(atlas, [&](int nd) {
      const Vec2 x = a->coordinate(nd);
      return Sym2Field::Components{t0(x), t1(x), t2(x)};
    });
  }
  std::vector<AmbientPoly> H;
  for (int q = 0; q < 6; ++q) H.push_back(make_poly(rng, bandlimit, amplitude));
  const int idx[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return Sym2Field::sample(atlas, [&](int nd) {
    const auto X = a->embedding(nd);
    const auto J = a->embedding_jacobian(nd);
    double Hv[6];
    for (int q = 0; q < 6; ++q) Hv[q] = H[q](X);
    Sym2Field::Components h{};
    const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
    for (int o = 0; o < 3; ++o)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h[o] += Hv[idx[i][j]] * J[i][pairs[o][0]] * J[j][pairs[o][1]];
    return h;
  });
}

MetricField random_conformal_metric(AtlasPtr atlas, Rng& rng, int bandlimit, double amplitude) {
  if (atlas->kind() != AtlasKind::torus) throw PreconditionError("random_conformal_metric: needs the torus atlas");
  return conformal_metric(random_scalar(std::move(atlas), rng, bandlimit, amplitude));
}

}  // namespace solitonkit::grid
