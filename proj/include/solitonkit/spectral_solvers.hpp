#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "solitonkit/atlas.hpp"

namespace solitonkit::grid {

struct EigenResult {
  Eigen::VectorXd values;   // real parts, ordered by distance to the shift
  Eigen::MatrixXd vectors;  // real parts of the eigenvectors (columns, unit Euclidean norm)
  double max_imag = 0.0;    // largest discarded imaginary part
  double max_residual = 0.0;  // max |A x - lambda B x| / |x| over returned pairs
};

/// Eigenpairs of A x = lambda B x (B = identity when omitted) closest to `shift`,
/// by shift-invert Arnoldi with a sparse LU factorization.
EigenResult eigensolve(const SparseMatrix& A, int count, double shift = 0.0,
                       const std::optional<SparseMatrix>& B = std::nullopt);

struct NearKernel {
  Eigen::MatrixXd basis;               // right singular vectors spanning the kernel (columns)
  std::vector<double> singular_values; // ascending, the smallest few
  int dimension = 0;
  double sigma_kept_max = 0.0;         // largest singular value kept (0 when dimension is 0)
  double sigma_rejected_min = 0.0;     // smallest singular value rejected
  double noise_floor = 0.0;            // eps * sigma_max * max(rows, cols)
  double certificate = 0.0;            // sigma_rejected_min / max(sigma_kept_max, noise_floor)
};

/// Numerical kernel of A with an explicit spectral gap: keeps the k smallest singular
/// directions when sigma_k < gap_ratio * sigma_{k+1}; dimension 0 is certified when the
/// smallest singular value exceeds the round-off floor by 1 / gap_ratio.
/// Throws UndecidedError when neither holds.
NearKernel near_kernel(const Eigen::MatrixXd& A, double gap_ratio = 1e-3, int max_dimension = 64);

}  // namespace solitonkit::grid
