#include "solitonkit/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace solitonkit::grid {

namespace {

Mat2 inverse(const Mat2& m, double& det) {
  det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return Mat2{{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
}

}  // namespace

CurvaturePack curvature_pack(const MetricField& metric) {
  const auto& atlas = *metric.atlas();
  const int nn = atlas.node_count();
  const double h[2] = {atlas.spacing(0), atlas.spacing(1)};
  CurvaturePack pack;
  pack.atlas = metric.atlas();
  pack.nodes.resize(nn);

  std::vector<char> has_gamma(nn, 0);
  for (int nd = 0; nd < nn; ++nd) {
    auto& G = pack.nodes[nd];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) G.g[a][b] = metric(nd, a, b);
    double det = 0.0;
    G.ginv = inverse(G.g, det);
    G.sqrt_det = std::sqrt(std::max(det, 0.0));
    const int nb[2][2] = {{atlas.shift(nd, -1, 0), atlas.shift(nd, 1, 0)}, {atlas.shift(nd, 0, -1), atlas.shift(nd, 0, 1)}};
    if (nb[0][0] < 0 || nb[0][1] < 0 || nb[1][0] < 0 || nb[1][1] < 0) continue;
    double dg[2][2][2];  // [c][a][b] = d_c g_ab
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) dg[c][a][b] = (metric(nb[c][1], a, b) - metric(nb[c][0], a, b)) / (2.0 * h[c]);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          double s = 0.0;
          for (int d = 0; d < 2; ++d) s += G.ginv[a][d] * (dg[b][c][d] + dg[c][b][d] - dg[d][b][c]);
          G.christoffel[a][b][c] = 0.5 * s;
        }
    has_gamma[nd] = 1;
  }

  for (int nd = 0; nd < nn; ++nd) {
    auto& G = pack.nodes[nd];
    const int nb[2][2] = {{atlas.shift(nd, -1, 0), atlas.shift(nd, 1, 0)}, {atlas.shift(nd, 0, -1), atlas.shift(nd, 0, 1)}};
    bool ok = has_gamma[nd];
    for (int c = 0; c < 2 && ok; ++c)
      for (int s = 0; s < 2; ++s) ok = ok && nb[c][s] >= 0 && has_gamma[nb[c][s]];
    if (!ok) continue;
    for (int d = 0; d < 2; ++d)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            G.dchristoffel[d][a][b][c] =
                (pack.nodes[nb[d][1]].christoffel[a][b][c] - pack.nodes[nb[d][0]].christoffel[a][b][c]) / (2.0 * h[d]);
    // R(d_c, d_d) d_b = Rup[a][b][c][d] d_a
    double Rup[2][2][2][2];
    const auto& Gm = G.christoffel;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) {
            double v = G.dchristoffel[c][a][d][b] - G.dchristoffel[d][a][c][b];
            for (int e = 0; e < 2; ++e) v += Gm[a][c][e] * Gm[e][d][b] - Gm[a][d][e] * Gm[e][c][b];
            Rup[a][b][c][d] = v;
          }
    // riemann[x][y][z][w] = g(R(d_x, d_y) d_z, d_w) = g_wa Rup[a][z][x][y]
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z)
          for (int w = 0; w < 2; ++w) {
            double v = 0.0;
            for (int a = 0; a < 2; ++a) v += G.g[w][a] * Rup[a][z][x][y];
            G.riemann[x][y][z][w] = v;
          }
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        double v = 0.0;
        for (int a = 0; a < 2; ++a) v += Rup[a][c][a][b];
        G.ricci[b][c] = v;
      }
    // Symmetrize the Ricci tensor (exactly symmetric up to round-off and O(h^2)).
    const double off = 0.5 * (G.ricci[0][1] + G.ricci[1][0]);
    G.ricci[0][1] = G.ricci[1][0] = off;
    G.scalar = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) G.scalar += G.ginv[a][b] * G.ricci[a][b];
    G.valid = true;
  }

  for (int nd : atlas.owned_nodes())
    if (!pack.nodes[nd].valid) throw PreconditionError("curvature_pack: owned node without a full stencil");

  pack.ricci = Sym2Field::sample(pack.atlas, [&](int nd) {
    const auto& r = pack.nodes[nd].ricci;
    return Sym2Field::Components{r[0][0], r[0][1], r[1][1]};
  });
  pack.scalar = ScalarField::sample(pack.atlas, [&](int nd) { return ScalarField::Components{pack.nodes[nd].scalar}; });
  return pack;
}

double riemann_symmetry_defect(const CurvaturePack& pack) {
  double worst = 0.0, scale = 0.0;
  for (int nd : pack.atlas->owned_nodes()) {
    const auto& R = pack.nodes[nd].riemann;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) {
            scale = std::max(scale, std::abs(R[a][b][c][d]));
            worst = std::max(worst, std::abs(R[a][b][c][d] + R[b][a][c][d]));
            worst = std::max(worst, std::abs(R[a][b][c][d] + R[a][b][d][c]));
            worst = std::max(worst, std::abs(R[a][b][c][d] + R[b][c][a][d] + R[c][a][b][d]));
          }
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace solitonkit::grid
