#pragma once

// Curvature of a metric field by second-order central differences.
//
// Conventions (coordinates x^a, standard curvature operator
// R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]):
//   christoffel[a][b][c]  = Gamma^a_bc
//   riemann[a][b][c][d]   = g(R(d_a, d_b) d_c, d_d), so that riemann[a][b][b][a] > 0 on spheres
//   ricci_bc              = sum_a g(R(d_a, d_b) d_c, d_a)  (Ric = g on the unit sphere)
// The curvature endomorphism used elsewhere, R_{XY} = nabla_[X,Y] - [nabla_X, nabla_Y],
// is the negative of R above.

#include <vector>

#include "solitonkit/field.hpp"

namespace solitonkit::grid {

using Tensor3 = double[2][2][2];
using Tensor4 = double[2][2][2][2];

struct NodeGeometry {
  Mat2 g{};
  Mat2 ginv{};
  double sqrt_det = 0.0;
  double christoffel[2][2][2] = {};
  double dchristoffel[2][2][2][2] = {};  // [d][a][b][c] = d_d Gamma^a_bc
  double riemann[2][2][2][2] = {};
  Mat2 ricci{};
  double scalar = 0.0;
  bool valid = false;  // derivatives available (all owned nodes are valid)
};

struct CurvaturePack {
  AtlasPtr atlas;
  std::vector<NodeGeometry> nodes;  // full layout
  Sym2Field ricci;
  ScalarField scalar;

  const NodeGeometry& at(int node) const { return nodes[node]; }
};

CurvaturePack curvature_pack(const MetricField& g);

/// Largest violation over owned nodes of the algebraic symmetries of the Riemann tensor
/// (antisymmetry in each pair and the first Bianchi identity), relative to max |Rm|.
double riemann_symmetry_defect(const CurvaturePack& pack);

}  // namespace solitonkit::grid
