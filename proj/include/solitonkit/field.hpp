#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "solitonkit/atlas.hpp"
#include "solitonkit/errors.hpp"

namespace solitonkit::grid {

/// A tensor field of a fixed kind on an atlas. Values are kept in the full
/// layout. Edge-band ghosts are always interpolated from the degrees of
/// freedom; other ghosts hold either interpolated (from_dofs) or chart-native
/// values (sample, stencil operators, pointwise arithmetic).
template <FieldKind K>
class Field {
 public:
  static constexpr FieldKind kind = K;
  static constexpr int components = component_count(K);
  using Components = std::array<double, components>;

  Field() = default;
  explicit Field(AtlasPtr atlas)
      : atlas_(std::move(atlas)), values_(Eigen::VectorXd::Zero(atlas_->node_count() * components)) {}

  static Field from_dofs(AtlasPtr atlas, const Eigen::VectorXd& dofs) {
    Field f;
    if (dofs.size() != atlas->owned_count() * components)
      throw PreconditionError("field: degree-of-freedom vector has the wrong length");
    f.values_ = atlas->extend(dofs, K);
    f.atlas_ = std::move(atlas);
    return f;
  }

  /// Takes full-layout values; the edge band is recomputed from the owned entries.
  static Field from_full(AtlasPtr atlas, const Eigen::VectorXd& full) {
    if (full.size() != atlas->node_count() * components)
      throw PreconditionError("field: full vector has the wrong length");
    Field f;
    f.values_ = atlas->resync_edge_band(full, K);
    f.atlas_ = std::move(atlas);
    return f;
  }

  /// Evaluates fn(node) -> Components on every node outside the edge band.
  template <class Fn>
  static Field sample(AtlasPtr atlas, Fn&& fn) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(atlas->node_count() * components);
    for (int nd : atlas->native_nodes()) {
      const Components v = fn(nd);
      for (int c = 0; c < components; ++c) full(nd * components + c) = v[c];
    }
    return from_full(std::move(atlas), full);
  }

  /// The same field with every ghost interpolated from the degrees of freedom.
  Field synced() const { return from_dofs(atlas_, dofs()); }

  const AtlasPtr& atlas() const { return atlas_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd dofs() const { return atlas_->restrict_to_dofs(values_, K); }
  bool empty() const { return atlas_ == nullptr; }

  double operator()(int node, int comp) const { return values_(node * components + comp); }
  Components at(int node) const {
    Components v{};
    for (int c = 0; c < components; ++c) v[c] = values_(node * components + c);
    return v;
  }
  /// h_ab for symmetric 2-tensors.
  double sym(int node, int a, int b) const {
    static_assert(K == FieldKind::sym2);
    return values_(node * components + sym_index(a, b));
  }

  /// Largest absolute component over owned nodes.
  double max_norm() const {
    double m = 0.0;
    for (int nd : atlas_->owned_nodes())
      for (int c = 0; c < components; ++c) m = std::max(m, std::abs(values_(nd * components + c)));
    return m;
  }

  Field& operator+=(const Field& o) {
    check_same(o);
    values_ += o.values_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    values_ -= o.values_;
    return *this;
  }
  Field& operator*=(double s) {
    values_ *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

  void check_same(const Field& o) const {
    if (!atlas_ || !o.atlas_ || !atlas_->same_as(*o.atlas_)) throw PreconditionError("atlas mismatch");
  }

 private:
  AtlasPtr atlas_;
  Eigen::VectorXd values_;
};

using ScalarField = Field<FieldKind::scalar>;
using VectorField = Field<FieldKind::vector>;
using CovectorField = Field<FieldKind::covector>;
using Sym2Field = Field<FieldKind::sym2>;

template <FieldKind A, FieldKind B>
void require_same_atlas(const Field<A>& a, const Field<B>& b) {
  if (!a.atlas() || !b.atlas() || !a.atlas()->same_as(*b.atlas())) throw PreconditionError("atlas mismatch");
}

/// A symmetric 2-tensor certified positive definite at every node used by computations.
class MetricField {
 public:
  explicit MetricField(Sym2Field g);
  const Sym2Field& tensor() const { return g_; }
  const AtlasPtr& atlas() const { return g_.atlas(); }
  double operator()(int node, int a, int b) const { return g_.sym(node, a, b); }

 private:
  Sym2Field g_;
};

/// Pointwise product u * T for any field kind.
template <FieldKind K>
Field<K> multiply(const ScalarField& u, const Field<K>& t) {
  require_same_atlas(u, t);
  Eigen::VectorXd v = t.values();
  const int nc = Field<K>::components;
  for (int nd = 0; nd < u.atlas()->node_count(); ++nd)
    for (int c = 0; c < nc; ++c) v(nd * nc + c) *= u(nd, 0);
  return Field<K>::from_full(t.atlas(), v);
}

/// Applies a scalar function pointwise.
template <class Fn>
ScalarField map(const ScalarField& u, Fn&& fn) {
  Eigen::VectorXd v = u.values();
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = fn(v(i));
  return ScalarField::from_full(u.atlas(), v);
}

ScalarField constant_scalar(AtlasPtr atlas, double value);

/// Flat metric dx^2 + dy^2 on the torus atlas.
MetricField flat_metric(AtlasPtr atlas);
/// e^{2 phi} (dx^2 + dy^2).
MetricField conformal_metric(const ScalarField& phi);
/// Round metric of radius sqrt(radius_sq) in stereographic coordinates: 4 r^2 / (1 + |w|^2)^2 delta.
MetricField round_sphere_metric(AtlasPtr atlas, double radius_sq);
/// The ambient linear function x^i restricted to the sphere atlas (i = 0, 1, 2).
ScalarField ambient_coordinate(AtlasPtr atlas, int i);

}  // namespace solitonkit::grid
