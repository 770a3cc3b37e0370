#pragma once

// Discrete tensor calculus on a base pair (g, f).
//
// Component formulas (coordinates x^a, Gamma^a_bc of g, grad f^a = g^ab d_b f):
//   hessian(u)_ab      = d_a d_b u - Gamma^c_ab d_c u
//   laplace(u)         = g^ab hessian(u)_ab                    (nonpositive spectrum)
//   lie_metric(X)_ab   = nabla_a X_b + nabla_b X_a             (X_b = g_bc X^c)
//   divergence(h)_c    = g^ab (nabla_a h)_bc  [ - grad f^b h_bc  when twisted ]
//   divergence(w)      = g^ab (nabla_a w)_b   [ - grad f^b w_b   when twisted ]
//   curvature_action(h)_ab = Rm(d_a, d_i, d_l, d_b) h^il, so curvature_action(g) = Ric
//   rough_laplacian(h)_cd  = g^ab (nabla^2_ab h)_cd  [ - grad f^e (nabla_e h)_cd when twisted ]
// with Rm(x, y, z, w) = g(R(d_x, d_y) d_z, d_w) as in curvature.hpp. With these choices
// <lie_metric(X), h>_f = -2 int (divergence_f h)(X) e^{-f} mu_g.

#include <memory>
#include <optional>
#include <string>

#include "solitonkit/curvature.hpp"
#include "solitonkit/linear_form.hpp"

namespace solitonkit::grid {

class Geometry {
 public:
  /// f omitted means f = 0.
  Geometry(MetricField g, std::optional<ScalarField> f = std::nullopt);

  const MetricField& metric() const { return g_; }
  const ScalarField& potential() const { return f_; }
  const CurvaturePack& curvature() const { return curv_; }
  const AtlasPtr& atlas() const { return g_.atlas(); }
  const NodeGeometry& at(int node) const { return curv_.nodes[node]; }
  /// d f and grad f at nodes outside the edge band (zero inside it).
  const Vec2& df(int node) const { return df_[node]; }
  const Vec2& grad_f(int node) const { return gradf_[node]; }
  /// True when f was given and is not identically zero.
  bool twisted() const { return twisted_; }

  /// Quadrature weight blend * sqrt(det g) * cell area at a node, optionally times e^{-f}.
  double weight(int node, bool with_exp_f) const;

 private:
  MetricField g_;
  ScalarField f_;
  CurvaturePack curv_;
  std::vector<Vec2> df_;
  std::vector<Vec2> gradf_;
  bool twisted_ = false;
};

using GeometryPtr = std::shared_ptr<const Geometry>;
GeometryPtr make_geometry(MetricField g, std::optional<ScalarField> f = std::nullopt);

// Operator builders. "twisted" uses the potential of the geometry.
StencilOp<FieldKind::scalar, FieldKind::covector> op_d(GeometryPtr geo);
StencilOp<FieldKind::scalar, FieldKind::vector> op_grad(GeometryPtr geo);
StencilOp<FieldKind::scalar, FieldKind::sym2> op_hessian(GeometryPtr geo);
StencilOp<FieldKind::scalar, FieldKind::scalar> op_laplace(GeometryPtr geo, bool twisted);
StencilOp<FieldKind::vector, FieldKind::sym2> op_lie_metric(GeometryPtr geo);
/// L_{w#} g for a covector w.
StencilOp<FieldKind::covector, FieldKind::sym2> op_lie_metric_cov(GeometryPtr geo);
StencilOp<FieldKind::sym2, FieldKind::covector> op_divergence(GeometryPtr geo, bool twisted);
StencilOp<FieldKind::covector, FieldKind::scalar> op_divergence_cov(GeometryPtr geo, bool twisted);
StencilOp<FieldKind::sym2, FieldKind::sym2> op_curvature_action(GeometryPtr geo);
StencilOp<FieldKind::sym2, FieldKind::sym2> op_rough_laplacian(GeometryPtr geo, bool twisted);
StencilOp<FieldKind::sym2, FieldKind::scalar> op_trace(GeometryPtr geo);
StencilOp<FieldKind::scalar, FieldKind::sym2> op_times_metric(GeometryPtr geo);
/// Ric o h + h o Ric, i.e. Ric_ac g^cd h_db + h_ac g^cd Ric_db.
StencilOp<FieldKind::sym2, FieldKind::sym2> op_ricci_compose(GeometryPtr geo);
/// [nabla h . nabla f]_ab = (nabla_a h)(grad f, d_b) + (nabla_b h)(grad f, d_a).
StencilOp<FieldKind::sym2, FieldKind::sym2> op_bracket_grad_f(GeometryPtr geo);
/// h(grad f, .)
StencilOp<FieldKind::sym2, FieldKind::covector> op_contract_grad_f(GeometryPtr geo);
StencilOp<FieldKind::vector, FieldKind::covector> op_lower(GeometryPtr geo);
StencilOp<FieldKind::covector, FieldKind::vector> op_raise(GeometryPtr geo);

// Field-level conveniences.
Sym2Field hessian(const MetricField& g, const ScalarField& u);
VectorField grad(const MetricField& g, const ScalarField& u);
ScalarField laplace(const MetricField& g, const ScalarField& u);
Sym2Field lie_metric(const MetricField& g, const VectorField& X);
/// Plain divergence when f is omitted, twisted divergence otherwise (computed as delta h - h(grad f, .)).
CovectorField divergence(const MetricField& g, const Sym2Field& h, const std::optional<ScalarField>& f = std::nullopt);
Sym2Field curvature_action(const MetricField& g, const Sym2Field& h);
ScalarField twisted_laplacian(const MetricField& g, const ScalarField& f, const ScalarField& u);
Sym2Field twisted_laplacian(const MetricField& g, const ScalarField& f, const Sym2Field& h);

/// g(grad u, grad u) at owned nodes.
ScalarField grad_norm_sq(const Geometry& geo, const ScalarField& u);

// Quadrature with the partition of unity. The weight e^{-f} uses the geometry's potential.
double integrate(const Geometry& geo, const ScalarField& u, bool with_exp_f);
template <FieldKind K>
double inner(const Geometry& geo, const Field<K>& a, const Field<K>& b, bool with_exp_f);
double integrate(const MetricField& g, const ScalarField& u, const std::optional<ScalarField>& f = std::nullopt);
double inner(const MetricField& g, const Sym2Field& h, const Sym2Field& k,
             const std::optional<ScalarField>& f = std::nullopt);

/// Pointwise pairing matrix of a field kind at a node (components as stored; sym2 off-diagonal
/// entries counted twice).
Eigen::MatrixXd pointwise_pairing(const NodeGeometry& G, FieldKind kind);

/// Symmetric positive definite Gram matrix of the (optionally twisted) inner product on degrees of freedom.
SparseMatrix mass_matrix(const Geometry& geo, FieldKind kind, bool with_exp_f);
/// Row vector q with integrate(u) = q . dofs(u).
Eigen::VectorXd quadrature_row(const Geometry& geo, bool with_exp_f);

struct OperatorDescriptor {
  FieldKind kind;
  std::string atlas;
};

enum class InnerProduct { none, plain, twisted };

/// A sparse linear map between discretized field spaces acting on degrees of freedom.
struct AssembledOperator {
  std::string name;
  SparseMatrix matrix;
  OperatorDescriptor domain;
  OperatorDescriptor codomain;
  InnerProduct symmetric_for = InnerProduct::none;

  /// Relative defect |<Au, v> - <u, Av>| / (|Au| |v|) in the given Gram matrix; requires domain == codomain.
  double symmetry_defect(const SparseMatrix& mass, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
};

template <FieldKind In, FieldKind Out>
AssembledOperator assemble(const std::string& name, const StencilOp<In, Out>& op,
                           InnerProduct symmetric_for = InnerProduct::none) {
  const auto d = op.atlas()->descriptor();
  return AssembledOperator{name, op.matrix(), {In, d}, {Out, d}, symmetric_for};
}

}  // namespace solitonkit::grid
