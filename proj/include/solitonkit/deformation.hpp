#pragma once

// Deformation spaces at a soliton (g, f).
//
//   Z = { (h, tr h / 2) : delta_f h = 0, lap_f h / 2 + R(h) = 0 }
//   E = { (h, 0) : delta h = 0, tr h = 0, lap h + 2 R(h) = 0 }      (f constant)
//
// Kernels are computed as the common null space of the stacked defining operators,
// each block measured in the pointwise (g, f) norm with lumped node weights. The
// constraint blocks are exact rows of the stacked system, so a kernel vector satisfies
// them to the same accuracy as the main equation.

#include <functional>
#include <string>
#include <vector>

#include "solitonkit/soliton.hpp"
#include "solitonkit/spectral_solvers.hpp"

namespace solitonkit {

struct KernelOptions {
  double gap_ratio = 1e-3;
  int max_dimension = 64;
};

struct KernelBasis {
  KernelBasis(std::string space_name, SolitonPair base_pair)
      : space(std::move(space_name)), base(std::move(base_pair)) {}

  std::string space;                              // "Z", "E" or "cp_family"
  SolitonPair base;
  std::vector<DeformationPair> elements;
  std::vector<std::string> equations;             // names of the defining equations
  std::vector<std::vector<double>> residual_norms;  // [element][equation], max-norm
  std::vector<double> spectrum;                   // smallest singular values (or eigenvalue distances)
  double sigma_kept_max = 0.0;
  double sigma_rejected_min = 0.0;
  double certificate = 0.0;                       // sigma_rejected_min / max(sigma_kept_max, floor)
  bool undecided = false;
  std::string note;

  int dimension() const { return static_cast<int>(elements.size()); }
};

/// Requires a normalized soliton. Elements are unit in the weighted L2 norm.
KernelBasis compute_Z(const SolitonPair& p, const KernelOptions& opt = {});
/// Requires constant f and an Einstein metric (Ric = c g, c > 0).
KernelBasis compute_E(const SolitonPair& p, const KernelOptions& opt = {});

/// Max-norms of (delta_f h, lap_f h / 2 + R(h), a - tr h / 2).
std::vector<double> z_residuals(const SolitonPair& p, const DeformationPair& d);
/// Max-norms of (delta h, tr h, lap h + 2 R(h), a).
std::vector<double> e_residuals(const SolitonPair& p, const DeformationPair& d);

struct RefinedKernel {
  std::vector<int> resolutions;
  std::vector<int> dimensions;       // -1 for an undecided run
  std::vector<KernelBasis> runs;     // one per resolution; the last is marked undecided when unstable
  bool stable = false;               // same dimension at every resolution

  const KernelBasis& finest() const { return runs.back(); }
};

/// Runs `solve` on base(resolution) for each resolution; the finest basis is marked
/// undecided unless all dimensions agree or any run was undecided.
RefinedKernel refine_kernel(const std::function<SolitonPair(int)>& base, const std::vector<int>& resolutions,
                            const std::function<KernelBasis(const SolitonPair&)>& solve);

struct SliceSplit {
  Sym2Field h;
  grid::VectorField X;
  Sym2Field h1;                 // h - L_X g
  double divergence = 0.0;      // max |delta_f h1| / max |delta_f h|, deflated directions removed
  double killing_defect = 0.0;  // max |delta_f h1| along the deflated directions, same scale
  double orthogonality = 0.0;   // |<L_X g, h1>_f| / (|L_X g|_f |h1|_f)
  int deflated = 0;
};

inline constexpr double kSliceKernelThreshold = 1e-10;
inline constexpr double kKillingGap = 1e-2;
inline constexpr int kKillingSearch = 8;

/// Twisted slice decomposition h = L_X g + h1 with delta_f h1 = 0. X is the weighted minimal-norm
/// least-squares solution of delta_f L_X g = delta_f h, operators composed in the full layout.
/// Deflated: singular values below kSliceKernelThreshold relative to the largest, and the
/// trailing cluster (at most kKillingSearch values) that sits below the rest by a ratio under
/// kKillingGap. The latter are discrete Killing fields, annihilated only to truncation error;
/// delta_f h along them is the compatibility defect, which the continuum problem sets to zero.
class SliceProjector {
 public:
  SliceProjector(const grid::MetricField& g, const ScalarField& f);
  SliceSplit project(const Sym2Field& h) const;
  int deflated() const { return deflated_; }

 private:
  grid::GeometryPtr geo_;
  SparseMatrix rc_, rc_inv_;  // covector node roots
  SparseMatrix rx_inv_;       // inverse vector node roots
  Eigen::MatrixXd U_, V_, Uk_;
  Eigen::VectorXd sigma_;
  int deflated_ = 0;
};

SliceSplit slice_project(const SolitonPair& p, const Sym2Field& h);

struct TraceGap {
  double value = 0.0;       // smallest eigenvalue of -lap_f on weighted-mean-zero functions
  double constant = 0.0;    // c in Ric + hess f = c g
  bool certifies = false;   // value > c (the trace identity threshold at normalization c)
};

/// Requires a gradient shrinking soliton Ric + hess f = c g with c > 0 (c = 1 for normalized pairs).
TraceGap trace_spectral_gap(const SolitonPair& p);

/// Per-element identity checks of the CP^1 family h = hess f + f g / 2, -lap f = f.
struct CpElement {
  double delta_h = 0.0;        // max |delta h|
  double lich = 0.0;           // max |lap h + 2 R(h)|
  double hess_divergence = 0.0;  // max |delta(hess f) + df / 2|
  double hess_lich = 0.0;      // max |lap(hess f) + 2 R(hess f)|
  double hess_norm = 0.0;      // max |hess f|
  double degeneracy = 0.0;     // |h|_L2 / |hess f|_L2
};

struct CpFamily {
  explicit CpFamily(KernelBasis b) : basis(std::move(b)) {}

  KernelBasis basis;               // elements (h_i, tr h_i / 2)
  std::vector<double> eigenvalues;  // computed eigenvalues of -lap nearest 1
  std::vector<CpElement> checks;
  int resolution = 0;
};

/// Builds F (eigenvalue 1 of -lap) on the Killing-normalized sphere S^2(sqrt 2) at the given
/// resolution. Throws UndecidedError when the eigenvalue-1 cluster has no gap.
CpFamily cp_family(int resolution, const KernelOptions& opt = {});

}  // namespace solitonkit
