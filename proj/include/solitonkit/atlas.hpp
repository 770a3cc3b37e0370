#pragma once

// Chart atlases for grid computations on closed surfaces.
//
// Two atlases are supported:
//   * a periodic flat chart for the torus T^2 (every node is a degree of freedom);
//   * a two-chart stereographic atlas for S^2. Chart 0 projects from the north
//     pole, chart 1 from the south pole, and the transition map is the
//     inversion w' = w / |w|^2. Each chart is the box [-L, L]^2; chart 0 owns
//     the nodes with |w| <= 1 and chart 1 those with |w'| < 1, so every point of
//     the sphere is represented by exactly one owned node. The remaining box
//     nodes are ghosts whose values are interpolated (local quintic least
//     squares) from nearby owned nodes of both charts, transformed as tensors
//     into the ghost's chart.
//
// Fields are stored on every box node ("full" layout: chart-major, node-major,
// component-minor). Owned nodes carry the degrees of freedom; the sync matrix
// maps degrees of freedom to the full layout. Pointwise and stencil
// computations are carried out natively on every node outside the edge band
// (the outer kEdgeBand layers of each box); only the edge band is always
// interpolated. Keeping ghost values chart-native means compositions of
// difference operators see one smooth truncation error per chart instead of a
// jump at the ownership boundary.
//
// Quadrature uses a smooth partition of unity chi_0 + chi_1 = 1 supported in
// |w| < 1.3 of each chart, so the trapezoidal sum of a smooth integrand is
// spectrally accurate.

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace solitonkit::grid {

inline constexpr int kDim = 2;

enum class AtlasKind { torus, sphere };
enum class FieldKind { scalar, vector, covector, sym2 };

constexpr int component_count(FieldKind kind) {
  switch (kind) {
    case FieldKind::scalar: return 1;
    case FieldKind::vector: return kDim;
    case FieldKind::covector: return kDim;
    case FieldKind::sym2: return kDim * (kDim + 1) / 2;
  }
  return 0;
}

/// Component slot of h_ab in a symmetric 2-tensor: (00, 01, 11).
constexpr int sym_index(int a, int b) { return a == b ? (a == 0 ? 0 : 2) : 1; }

std::string to_string(FieldKind kind);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

struct Chart {
  Vec2 lo{};
  Vec2 hi{};
  int resolution = 0;
  bool periodic = false;
};

class ChartAtlas {
 public:
  /// Periodic box [0, Lx) x [0, Ly) with `resolution` nodes per axis.
  static std::shared_ptr<const ChartAtlas> torus(int resolution, double period_x, double period_y);
  /// Two-chart stereographic atlas of S^2 (coordinates only; the metric is a field).
  static std::shared_ptr<const ChartAtlas> sphere(int resolution);

  AtlasKind kind() const { return kind_; }
  int chart_count() const { return static_cast<int>(charts_.size()); }
  const Chart& chart(int c) const { return charts_[c]; }
  int resolution() const { return resolution_; }
  double spacing(int axis) const { return spacing_[axis]; }

  int node_count() const { return chart_count() * resolution_ * resolution_; }
  int node(int chart, int i, int j) const { return (chart * resolution_ + i) * resolution_ + j; }
  int chart_of(int node) const { return node / (resolution_ * resolution_); }
  int index_i(int node) const { return (node / resolution_) % resolution_; }
  int index_j(int node) const { return node % resolution_; }
  Vec2 coordinate(int node) const;

  /// Neighbour at integer offset (di, dj) in the same chart; -1 when it leaves a non-periodic box.
  int shift(int node, int di, int dj) const;

  bool owned(int node) const { return dof_of_node_[node] >= 0; }
  int dof_of_node(int node) const { return dof_of_node_[node]; }
  const std::vector<int>& owned_nodes() const { return owned_nodes_; }
  int owned_count() const { return static_cast<int>(owned_nodes_.size()); }

  /// Nodes outside the edge band (every node on the torus).
  const std::vector<int>& native_nodes() const { return native_nodes_; }
  bool in_edge_band(int node) const { return edge_band_[node] != 0; }
  /// Replaces the edge-band entries of full-layout values by interpolation from the owned entries.
  Eigen::VectorXd resync_edge_band(const Eigen::VectorXd& full, FieldKind kind) const;
  /// Matrix form of resync_edge_band (full layout to full layout).
  const SparseMatrix& band_resync_matrix(FieldKind kind) const;
  /// Selects the owned entries of full-layout values.
  const SparseMatrix& restriction_matrix(FieldKind kind) const;

  /// Partition-of-unity weight of a node (1 everywhere on the torus).
  double blend(int node) const { return blend_[node]; }
  /// Coordinate cell area h_x * h_y.
  double cell_area() const { return spacing_[0] * spacing_[1]; }

  /// Full-layout values = sync_matrix(kind) * degrees of freedom.
  const SparseMatrix& sync_matrix(FieldKind kind) const;
  Eigen::VectorXd extend(const Eigen::VectorXd& dofs, FieldKind kind) const;
  Eigen::VectorXd restrict_to_dofs(const Eigen::VectorXd& full, FieldKind kind) const;

  /// Unit-sphere embedding of a node and its coordinate Jacobian dX^i/dw^a (sphere atlas only).
  std::array<double, 3> embedding(int node) const;
  std::array<Vec2, 3> embedding_jacobian(int node) const;

  /// Stable textual descriptor used in hashes and file headers.
  std::string descriptor() const;
  bool same_as(const ChartAtlas& other) const { return descriptor() == other.descriptor(); }

 private:
  ChartAtlas() = default;
  void finalize_ownership();
  void build_sync();

  AtlasKind kind_ = AtlasKind::torus;
  int resolution_ = 0;
  Vec2 spacing_{};
  std::vector<Chart> charts_;
  std::vector<int> dof_of_node_;
  std::vector<int> owned_nodes_;
  std::vector<int> native_nodes_;
  std::vector<char> edge_band_;
  std::vector<double> blend_;
  // Ghost interpolation: for each ghost node, owned source nodes (from either chart),
  // weights, and per source the transition Jacobians into the ghost's chart.
  struct GhostStencil {
    int node = -1;
    std::vector<int> sources;
    std::vector<double> weights;
    std::vector<Mat2> jac;      // J_ba = d w'^b / d w^a at the source (w' = source chart)
    std::vector<Mat2> jac_inv;  // d w^a / d w'^b at the source
  };
  std::vector<GhostStencil> ghosts_;
  std::array<SparseMatrix, 4> sync_;
  std::array<SparseMatrix, 4> band_resync_;
  std::array<SparseMatrix, 4> restrict_;
};

using AtlasPtr = std::shared_ptr<const ChartAtlas>;

/// Stereographic half-width of each sphere chart and the partition-of-unity radius.
inline constexpr double kSphereBoxHalfWidth = 1.5;
inline constexpr double kSphereBlendRadius = 1.3;
/// Width of the always-interpolated band along each non-periodic box edge.
inline constexpr int kEdgeBand = 2;

}  // namespace solitonkit::grid
