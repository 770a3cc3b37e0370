#pragma once

// Pointwise linear differential forms and the stencil operators built from them.
//
// At each node an operator is described by one LinExpr per output
// component: coefficients of (value, d_u, d_v, d_uu, d_uv, d_vv) of each input
// component. Derivatives use second-order stencils: central first differences,
// compact three-point pure second differences and the four-corner mixed
// difference. The same description is either applied to a field or assembled
// into a sparse matrix acting on degrees of freedom; both paths agree to
// round-off on synced inputs. Applied to a field, the operator is evaluated on
// every node outside the edge band, so results keep chart-native ghosts.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "solitonkit/field.hpp"

namespace solitonkit::grid {

enum Deriv : int { kVal = 0, kDu = 1, kDv = 2, kDuu = 3, kDuv = 4, kDvv = 5 };
inline constexpr int kDerivCount = 6;

struct LinExpr {
  std::array<std::array<double, kDerivCount>, 3> c{};

  void val(int comp, double k) { c[comp][kVal] += k; }
  void d(int axis, int comp, double k) { c[comp][kDu + axis] += k; }
  void dd(int a, int b, int comp, double k) { c[comp][a == b ? (a == 0 ? kDuu : kDvv) : kDuv] += k; }
  void axpy(double s, const LinExpr& o) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < kDerivCount; ++j) c[i][j] += s * o.c[i][j];
  }
};

/// Stencil taps (di, dj, weight) of a derivative kind, before division by the spacing.
struct Tap {
  int di, dj;
  double w;
};
const std::vector<Tap>& deriv_taps(int deriv);
/// Spacing factor that divides the taps of a derivative kind.
double deriv_scale(const ChartAtlas& atlas, int deriv);

template <FieldKind In, FieldKind Out>
class StencilOp {
 public:
  static constexpr int kIn = component_count(In);
  static constexpr int kOut = component_count(Out);
  using Forms = std::array<LinExpr, kOut>;
  using FormFn = std::function<void(int node, Forms& out)>;

  StencilOp() = default;
  StencilOp(AtlasPtr atlas, FormFn fn) : atlas_(std::move(atlas)), fn_(std::move(fn)) {}

  const AtlasPtr& atlas() const { return atlas_; }

  Field<Out> operator()(const Field<In>& u) const {
    if (!u.atlas()->same_as(*atlas_)) throw PreconditionError("atlas mismatch");
    const Eigen::VectorXd& v = u.values();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(atlas_->node_count() * kOut);
    Forms forms;
    for (int nd : atlas_->native_nodes()) {
      forms = Forms{};
      fn_(nd, forms);
      for (int o = 0; o < kOut; ++o) {
        double s = 0.0;
        for (int ic = 0; ic < kIn; ++ic)
          for (int dv = 0; dv < kDerivCount; ++dv) {
            const double coef = forms[o].c[ic][dv];
            if (coef == 0.0) continue;
            double acc = 0.0;
            for (const Tap& t : deriv_taps(dv)) acc += t.w * v(neighbor(nd, t) * kIn + ic);
            s += coef * acc / deriv_scale(*atlas_, dv);
          }
        out(nd * kOut + o) = s;
      }
    }
    return Field<Out>::from_full(atlas_, out);
  }

  /// Matrix acting on degrees of freedom: rows = owned nodes of Out, columns = owned nodes of In.
  SparseMatrix matrix() const {
    SparseMatrix M = stencil_rows(atlas_->owned_nodes(), true) * atlas_->sync_matrix(In);
    M.prune(0.0);
    M.makeCompressed();
    return M;
  }

  /// Full layout to full layout, matching operator() exactly; products of these matrices reproduce
  /// compositions of applied operators.
  SparseMatrix full_matrix() const {
    SparseMatrix M = atlas_->band_resync_matrix(Out) * stencil_rows(atlas_->native_nodes(), false);
    M.prune(0.0);
    M.makeCompressed();
    return M;
  }

 private:
  // Rows indexed by position in `nodes` (compact) or by node (full layout).
  SparseMatrix stencil_rows(const std::vector<int>& nodes, bool compact) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(nodes.size() * kOut * kIn * 9);
    Forms forms;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const int nd = nodes[k];
      const int row = compact ? static_cast<int>(k) : nd;
      forms = Forms{};
      fn_(nd, forms);
      for (int o = 0; o < kOut; ++o)
        for (int ic = 0; ic < kIn; ++ic)
          for (int dv = 0; dv < kDerivCount; ++dv) {
            const double coef = forms[o].c[ic][dv];
            if (coef == 0.0) continue;
            const double s = coef / deriv_scale(*atlas_, dv);
            for (const Tap& t : deriv_taps(dv)) trip.emplace_back(row * kOut + o, neighbor(nd, t) * kIn + ic, s * t.w);
          }
    }
    const int rows = compact ? static_cast<int>(nodes.size()) : atlas_->node_count();
    SparseMatrix B(rows * kOut, atlas_->node_count() * kIn);
    B.setFromTriplets(trip.begin(), trip.end());
    return B;
  }

  int neighbor(int nd, const Tap& t) const {
    const int m = (t.di == 0 && t.dj == 0) ? nd : atlas_->shift(nd, t.di, t.dj);
    if (m < 0) throw IntegrityError("stencil leaves the chart box");
    return m;
  }

  AtlasPtr atlas_;
  FormFn fn_;
};

}  // namespace solitonkit::grid
