#include "solitonkit/operators.hpp"

#include <cmath>

namespace solitonkit::grid {

const std::vector<Tap>& deriv_taps(int deriv) {
  static const std::vector<Tap> taps[kDerivCount] = {
      {{0, 0, 1.0}},
      {{1, 0, 1.0}, {-1, 0, -1.0}},
      {{0, 1, 1.0}, {0, -1, -1.0}},
      {{1, 0, 1.0}, {0, 0, -2.0}, {-1, 0, 1.0}},
      {{1, 1, 1.0}, {1, -1, -1.0}, {-1, 1, -1.0}, {-1, -1, 1.0}},
      {{0, 1, 1.0}, {0, 0, -2.0}, {0, -1, 1.0}},
  };
  return taps[deriv];
}

double deriv_scale(const ChartAtlas& atlas, int deriv) {
  const double hx = atlas.spacing(0), hy = atlas.spacing(1);
  switch (deriv) {
    case kVal: return 1.0;
    case kDu: return 2.0 * hx;
    case kDv: return 2.0 * hy;
    case kDuu: return hx * hx;
    case kDuv: return 4.0 * hx * hy;
    case kDvv: return hy * hy;
  }
  return 1.0;
}

Geometry::Geometry(MetricField g, std::optional<ScalarField> f)
    : g_(std::move(g)),
      f_(f ? std::move(*f) : constant_scalar(g_.atlas(), 0.0)),
      curv_(curvature_pack(g_)) {
  require_same_atlas(g_.tensor(), f_);
  twisted_ = f_.values().cwiseAbs().maxCoeff() != 0.0;
  const auto& atlas = *g_.atlas();
  df_.assign(atlas.node_count(), Vec2{0.0, 0.0});
  gradf_.assign(atlas.node_count(), Vec2{0.0, 0.0});
  for (int nd : atlas.native_nodes()) {
    Vec2 d{};
    d[0] = (f_(atlas.shift(nd, 1, 0), 0) - f_(atlas.shift(nd, -1, 0), 0)) / (2.0 * atlas.spacing(0));
    d[1] = (f_(atlas.shift(nd, 0, 1), 0) - f_(atlas.shift(nd, 0, -1), 0)) / (2.0 * atlas.spacing(1));
    df_[nd] = d;
    const auto& gi = curv_.nodes[nd].ginv;
    gradf_[nd] = {gi[0][0] * d[0] + gi[0][1] * d[1], gi[1][0] * d[0] + gi[1][1] * d[1]};
  }
}

double Geometry::weight(int node, bool with_exp_f) const {
  const auto& atlas = *g_.atlas();
  const double b = atlas.blend(node);
  if (b <= 0.0) return 0.0;
  double w = b * curv_.nodes[node].sqrt_det * atlas.cell_area();
  if (with_exp_f) w *= std::exp(-f_(node, 0));
  return w;
}

GeometryPtr make_geometry(MetricField g, std::optional<ScalarField> f) {
  return std::make_shared<const Geometry>(std::move(g), std::move(f));
}

namespace {

constexpr int S(int a, int b) { return sym_index(a, b); }

// s * (nabla_e h)_cd
void add_nabla_h(const NodeGeometry& G, int e, int c, int d, double s, LinExpr& L) {
  if (s == 0.0) return;
  L.d(e, S(c, d), s);
  for (int k = 0; k < 2; ++k) {
    L.val(S(k, d), -s * G.christoffel[k][e][c]);
    L.val(S(c, k), -s * G.christoffel[k][e][d]);
  }
}

const int kPairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};

}  // namespace

StencilOp<FieldKind::scalar, FieldKind::covector> op_d(GeometryPtr geo) {
  return {geo->atlas(), [](int, auto& out) {
            for (int a = 0; a < 2; ++a) out[a].d(a, 0, 1.0);
          }};
}

StencilOp<FieldKind::scalar, FieldKind::vector> op_grad(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) out[a].d(b, 0, G.ginv[a][b]);
          }};
}

StencilOp<FieldKind::scalar, FieldKind::sym2> op_hessian(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int o = 0; o < 3; ++o) {
              const int a = kPairs[o][0], b = kPairs[o][1];
              out[o].dd(a, b, 0, 1.0);
              for (int c = 0; c < 2; ++c) out[o].d(c, 0, -G.christoffel[c][a][b]);
            }
          }};
}

StencilOp<FieldKind::scalar, FieldKind::scalar> op_laplace(GeometryPtr geo, bool twisted) {
  return {geo->atlas(), [geo, twisted](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) {
                out[0].dd(a, b, 0, G.ginv[a][b]);
                for (int c = 0; c < 2; ++c) out[0].d(c, 0, -G.ginv[a][b] * G.christoffel[c][a][b]);
              }
            if (twisted)
              for (int a = 0; a < 2; ++a) out[0].d(a, 0, -geo->grad_f(nd)[a]);
          }};
}

StencilOp<FieldKind::vector, FieldKind::sym2> op_lie_metric(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int o = 0; o < 3; ++o) {
              const int a = kPairs[o][0], b = kPairs[o][1];
              for (int c = 0; c < 2; ++c) {
                out[o].d(a, c, G.g[b][c]);
                out[o].d(b, c, G.g[a][c]);
                for (int d = 0; d < 2; ++d)
                  out[o].val(d, G.g[b][c] * G.christoffel[c][a][d] + G.g[a][c] * G.christoffel[c][b][d]);
              }
            }
          }};
}

StencilOp<FieldKind::covector, FieldKind::sym2> op_lie_metric_cov(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int o = 0; o < 3; ++o) {
              const int a = kPairs[o][0], b = kPairs[o][1];
              out[o].d(a, b, 1.0);
              out[o].d(b, a, 1.0);
              for (int c = 0; c < 2; ++c) out[o].val(c, -2.0 * G.christoffel[c][a][b]);
            }
          }};
}

StencilOp<FieldKind::sym2, FieldKind::covector> op_divergence(GeometryPtr geo, bool twisted) {
  return {geo->atlas(), [geo, twisted](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int c = 0; c < 2; ++c) {
              for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) add_nabla_h(G, a, b, c, G.ginv[a][b], out[c]);
              if (twisted)
                for (int b = 0; b < 2; ++b) out[c].val(S(b, c), -geo->grad_f(nd)[b]);
            }
          }};
}

StencilOp<FieldKind::covector, FieldKind::scalar> op_divergence_cov(GeometryPtr geo, bool twisted) {
  return {geo->atlas(), [geo, twisted](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) {
                out[0].d(a, b, G.ginv[a][b]);
                for (int e = 0; e < 2; ++e) out[0].val(e, -G.ginv[a][b] * G.christoffel[e][a][b]);
              }
            if (twisted)
              for (int b = 0; b < 2; ++b) out[0].val(b, -geo->grad_f(nd)[b]);
          }};
}

StencilOp<FieldKind::sym2, FieldKind::sym2> op_curvature_action(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int o = 0; o < 3; ++o) {
              const int a = kPairs[o][0], b = kPairs[o][1];
              for (int i = 0; i < 2; ++i)
                for (int l = 0; l < 2; ++l)
                  for (int p = 0; p < 2; ++p)
                    for (int q = 0; q < 2; ++q)
                      out[o].val(S(p, q), G.riemann[a][i][l][b] * G.ginv[i][p] * G.ginv[l][q]);
            }
          }};
}

StencilOp<FieldKind::sym2, FieldKind::sym2> op_rough_laplacian(GeometryPtr geo, bool twisted) {
  return {geo->atlas(), [geo, twisted](int nd, auto& out) {
            const auto& G = geo->at(nd);
            const auto& Gm = G.christoffel;
            for (int o = 0; o < 3; ++o) {
              const int c = kPairs[o][0], d = kPairs[o][1];
              LinExpr& L = out[o];
              for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                  const double gab = G.ginv[a][b];
                  if (gab == 0.0) continue;
                  L.dd(a, b, S(c, d), gab);
                  for (int e = 0; e < 2; ++e) {
                    L.val(S(e, d), -gab * G.dchristoffel[a][e][b][c]);
                    L.d(a, S(e, d), -gab * Gm[e][b][c]);
                    L.val(S(c, e), -gab * G.dchristoffel[a][e][b][d]);
                    L.d(a, S(c, e), -gab * Gm[e][b][d]);
                    add_nabla_h(G, e, c, d, -gab * Gm[e][a][b], L);
                    add_nabla_h(G, b, e, d, -gab * Gm[e][a][c], L);
                    add_nabla_h(G, b, c, e, -gab * Gm[e][a][d], L);
                  }
                }
              if (twisted)
                for (int e = 0; e < 2; ++e) add_nabla_h(G, e, c, d, -geo->grad_f(nd)[e], L);
            }
          }};
}

StencilOp<FieldKind::sym2, FieldKind::scalar> op_trace(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) out[0].val(S(a, b), G.ginv[a][b]);
          }};
}

StencilOp<FieldKind::scalar, FieldKind::sym2> op_times_metric(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int o = 0; o < 3; ++o) out[o].val(0, G.g[kPairs[o][0]][kPairs[o][1]]);
          }};
}

StencilOp<FieldKind::sym2, FieldKind::sym2> op_ricci_compose(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int o = 0; o < 3; ++o) {
              const int a = kPairs[o][0], b = kPairs[o][1];
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                  out[o].val(S(d, b), G.ricci[a][c] * G.ginv[c][d]);
                  out[o].val(S(a, c), G.ginv[c][d] * G.ricci[d][b]);
                }
            }
          }};
}

StencilOp<FieldKind::sym2, FieldKind::sym2> op_bracket_grad_f(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            const Vec2& gf = geo->grad_f(nd);
            for (int o = 0; o < 3; ++o) {
              const int a = kPairs[o][0], b = kPairs[o][1];
              for (int e = 0; e < 2; ++e) {
                add_nabla_h(G, a, e, b, gf[e], out[o]);
                add_nabla_h(G, b, e, a, gf[e], out[o]);
              }
            }
          }};
}

StencilOp<FieldKind::sym2, FieldKind::covector> op_contract_grad_f(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const Vec2& gf = geo->grad_f(nd);
            for (int c = 0; c < 2; ++c)
              for (int b = 0; b < 2; ++b) out[c].val(S(b, c), gf[b]);
          }};
}

StencilOp<FieldKind::vector, FieldKind::covector> op_lower(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) out[a].val(b, G.g[a][b]);
          }};
}

StencilOp<FieldKind::covector, FieldKind::vector> op_raise(GeometryPtr geo) {
  return {geo->atlas(), [geo](int nd, auto& out) {
            const auto& G = geo->at(nd);
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) out[a].val(b, G.ginv[a][b]);
          }};
}

Sym2Field hessian(const MetricField& g, const ScalarField& u) { return op_hessian(make_geometry(g))(u); }
VectorField grad(const MetricField& g, const ScalarField& u) { return op_grad(make_geometry(g))(u); }
ScalarField laplace(const MetricField& g, const ScalarField& u) { return op_laplace(make_geometry(g), false)(u); }
Sym2Field lie_metric(const MetricField& g, const VectorField& X) { return op_lie_metric(make_geometry(g))(X); }

CovectorField divergence(const MetricField& g, const Sym2Field& h, const std::optional<ScalarField>& f) {
  require_same_atlas(g.tensor(), h);
  if (!f) return op_divergence(make_geometry(g), false)(h);
  return op_divergence(make_geometry(g, *f), true)(h);
}

Sym2Field curvature_action(const MetricField& g, const Sym2Field& h) {
  require_same_atlas(g.tensor(), h);
  return op_curvature_action(make_geometry(g))(h);
}

ScalarField twisted_laplacian(const MetricField& g, const ScalarField& f, const ScalarField& u) {
  return op_laplace(make_geometry(g, f), true)(u);
}

Sym2Field twisted_laplacian(const MetricField& g, const ScalarField& f, const Sym2Field& h) {
  return op_rough_laplacian(make_geometry(g, f), true)(h);
}

ScalarField grad_norm_sq(const Geometry& geo, const ScalarField& u) {
  const auto d = op_d(std::shared_ptr<const Geometry>(&geo, [](const Geometry*) {}))(u);
  return ScalarField::sample(geo.atlas(), [&](int nd) {
    const auto& G = geo.at(nd);
    double s = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) s += G.ginv[a][b] * d(nd, a) * d(nd, b);
    return ScalarField::Components{s};
  });
}

namespace {

// Pointwise pairing matrix P (components x components) so that <a, b> = a^T P b at a node.
template <FieldKind K>
void pairing(const NodeGeometry& G, double P[3][3]) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) P[i][j] = 0.0;
  if constexpr (K == FieldKind::scalar) {
    P[0][0] = 1.0;
  } else if constexpr (K == FieldKind::vector) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) P[a][b] = G.g[a][b];
  } else if constexpr (K == FieldKind::covector) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) P[a][b] = G.ginv[a][b];
  } else {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) P[S(a, b)][S(c, d)] += G.ginv[a][c] * G.ginv[b][d];
  }
}

template <FieldKind K>
SparseMatrix mass_matrix_impl(const Geometry& geo, bool with_exp_f) {
  const auto& atlas = *geo.atlas();
  constexpr int nc = component_count(K);
  std::vector<Eigen::Triplet<double>> trip;
  for (int nd = 0; nd < atlas.node_count(); ++nd) {
    const double w = geo.weight(nd, with_exp_f);
    if (w == 0.0) continue;
    double P[3][3];
    pairing<K>(geo.at(nd), P);
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j)
        if (P[i][j] != 0.0) trip.emplace_back(nd * nc + i, nd * nc + j, w * P[i][j]);
  }
  SparseMatrix D(atlas.node_count() * nc, atlas.node_count() * nc);
  D.setFromTriplets(trip.begin(), trip.end());
  const SparseMatrix& Sy = atlas.sync_matrix(K);
  SparseMatrix St = Sy.transpose();
  SparseMatrix M = St * D * Sy;
  M.makeCompressed();
  return M;
}

}  // namespace

template <FieldKind K>
double inner(const Geometry& geo, const Field<K>& a, const Field<K>& b, bool with_exp_f) {
  a.check_same(b);
  if (!a.atlas()->same_as(*geo.atlas())) throw PreconditionError("atlas mismatch");
  constexpr int nc = component_count(K);
  double s = 0.0;
  for (int nd = 0; nd < geo.atlas()->node_count(); ++nd) {
    const double w = geo.weight(nd, with_exp_f);
    if (w == 0.0) continue;
    double P[3][3];
    pairing<K>(geo.at(nd), P);
    double v = 0.0;
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j) v += a(nd, i) * P[i][j] * b(nd, j);
    s += w * v;
  }
  return s;
}

template double inner(const Geometry&, const ScalarField&, const ScalarField&, bool);
template double inner(const Geometry&, const VectorField&, const VectorField&, bool);
template double inner(const Geometry&, const CovectorField&, const CovectorField&, bool);
template double inner(const Geometry&, const Sym2Field&, const Sym2Field&, bool);

double integrate(const Geometry& geo, const ScalarField& u, bool with_exp_f) {
  if (!u.atlas()->same_as(*geo.atlas())) throw PreconditionError("atlas mismatch");
  double s = 0.0;
  for (int nd = 0; nd < geo.atlas()->node_count(); ++nd) {
    const double w = geo.weight(nd, with_exp_f);
    if (w != 0.0) s += w * u(nd, 0);
  }
  return s;
}

double integrate(const MetricField& g, const ScalarField& u, const std::optional<ScalarField>& f) {
  const Geometry geo(g, f);
  return integrate(geo, u, f.has_value());
}

double inner(const MetricField& g, const Sym2Field& h, const Sym2Field& k, const std::optional<ScalarField>& f) {
  const Geometry geo(g, f);
  return inner(geo, h, k, f.has_value());
}

Eigen::MatrixXd pointwise_pairing(const NodeGeometry& G, FieldKind kind) {
  double P[3][3];
  switch (kind) {
    case FieldKind::scalar: pairing<FieldKind::scalar>(G, P); break;
    case FieldKind::vector: pairing<FieldKind::vector>(G, P); break;
    case FieldKind::covector: pairing<FieldKind::covector>(G, P); break;
    case FieldKind::sym2: pairing<FieldKind::sym2>(G, P); break;
  }
  const int nc = component_count(kind);
  Eigen::MatrixXd M(nc, nc);
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) M(i, j) = P[i][j];
  return M;
}

SparseMatrix mass_matrix(const Geometry& geo, FieldKind kind, bool with_exp_f) {
  switch (kind) {
    case FieldKind::scalar: return mass_matrix_impl<FieldKind::scalar>(geo, with_exp_f);
    case FieldKind::vector: return mass_matrix_impl<FieldKind::vector>(geo, with_exp_f);
    case FieldKind::covector: return mass_matrix_impl<FieldKind::covector>(geo, with_exp_f);
    case FieldKind::sym2: return mass_matrix_impl<FieldKind::sym2>(geo, with_exp_f);
  }
  throw PreconditionError("mass_matrix: unknown field kind");
}

Eigen::VectorXd quadrature_row(const Geometry& geo, bool with_exp_f) {
  const auto& atlas = *geo.atlas();
  Eigen::VectorXd w(atlas.node_count());
  for (int nd = 0; nd < atlas.node_count(); ++nd) w(nd) = geo.weight(nd, with_exp_f);
  return atlas.sync_matrix(FieldKind::scalar).transpose() * w;
}

double AssembledOperator::symmetry_defect(const SparseMatrix& mass, const Eigen::VectorXd& u,
                                          const Eigen::VectorXd& v) const {
  if (domain.kind != codomain.kind || matrix.rows() != matrix.cols())
    throw PreconditionError("symmetry_defect: operator is not an endomorphism");
  const Eigen::VectorXd Au = matrix * u, Av = matrix * v;
  const double lhs = Au.dot(mass * v), rhs = u.dot(mass * Av);
  const double scale = std::sqrt(Au.dot(mass * Au) * v.dot(mass * v));
  return scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
}

}  // namespace solitonkit::grid
