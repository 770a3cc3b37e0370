#include "solitonkit/spectral_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "solitonkit/errors.hpp"

namespace solitonkit::grid {

EigenResult eigensolve(const SparseMatrix& A, int count, double shift, const std::optional<SparseMatrix>& B) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw PreconditionError("eigensolve: matrix is not square");
  if (count < 1 || count > n) throw PreconditionError("eigensolve: count out of range");
  Eigen::SparseMatrix<double, Eigen::ColMajor> shifted = A;
  Eigen::SparseMatrix<double, Eigen::ColMajor> Bc;
  if (B) {
    Bc = *B;
    shifted -= shift * Bc;
  } else {
    Bc.resize(n, n);
    Bc.setIdentity();
    shifted -= shift * Bc;
  }
  shifted.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw UndecidedError("eigensolve: shift coincides with an eigenvalue");

  Eigen::Index m = std::min<Eigen::Index>(n, std::max<Eigen::Index>(40, 4 * count + 20));
  Eigen::VectorXd start = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) += 0.1 * std::sin(1.7 * static_cast<double>(i) + 0.3);

  EigenResult best;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    V.col(0) = start.normalized();
    Eigen::Index built = m;
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::VectorXd w = lu.solve(Bc * V.col(j));
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index i = 0; i <= j; ++i) {
          const double hij = V.col(i).dot(w);
          H(i, j) += hij;
          w -= hij * V.col(i);
        }
      const double nw = w.norm();
      H(j + 1, j) = nw;
      if (nw < 1e-14) {
        built = j + 1;
        break;
      }
      V.col(j + 1) = w / nw;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(built, built));
    const Eigen::VectorXcd mu = es.eigenvalues();
    const Eigen::MatrixXcd Y = es.eigenvectors();
    std::vector<Eigen::Index> order(built);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return std::abs(mu(a)) > std::abs(mu(b)); });

    EigenResult res;
    const int take = static_cast<int>(std::min<Eigen::Index>(count, built));
    res.values.resize(take);
    res.vectors.resize(n, take);
    const Eigen::MatrixXcd Vc = V.leftCols(built).cast<std::complex<double>>();
    for (int k = 0; k < take; ++k) {
      const std::complex<double> lam = shift + 1.0 / mu(order[k]);
      Eigen::VectorXcd x = Vc * Y.col(order[k]);
      // Rotate to make the vector as real as possible.
      Eigen::Index imax = 0;
      x.cwiseAbs().maxCoeff(&imax);
      x *= std::conj(x(imax)) / std::abs(x(imax));
      Eigen::VectorXd xr = x.real();
      xr.normalize();
      res.values(k) = lam.real();
      res.vectors.col(k) = xr;
      res.max_imag = std::max(res.max_imag, std::abs(lam.imag()));
      const double r = (A * xr - lam.real() * (Bc * xr)).norm();
      res.max_residual = std::max(res.max_residual, r);
    }
    best = res;
    const double scale = std::max(1.0, res.values.cwiseAbs().maxCoeff());
    if (res.max_residual < 1e-8 * scale || m == n) break;
    start = res.vectors.rowwise().sum();
    m = std::min<Eigen::Index>(n, 2 * m);
  }
  return best;
}

NearKernel near_kernel(const Eigen::MatrixXd& A, double gap_ratio, int max_dimension) {
  if (!(gap_ratio > 0.0 && gap_ratio < 1.0)) throw PreconditionError("near_kernel: gap_ratio must lie in (0, 1)");
  if (A.rows() < A.cols()) throw PreconditionError("near_kernel: needs at least as many rows as columns");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
  const Eigen::VectorXd sv_desc = svd.singularValues();
  const Eigen::Index p = sv_desc.size();
  if (p == 0) throw PreconditionError("near_kernel: empty matrix");
  std::vector<double> sv(sv_desc.data(), sv_desc.data() + p);
  std::reverse(sv.begin(), sv.end());
  const Eigen::Index ncols = A.cols();

  NearKernel out;
  out.noise_floor = std::numeric_limits<double>::epsilon() * sv.back() * static_cast<double>(std::max(A.rows(), A.cols()));
  const int show = static_cast<int>(std::min<Eigen::Index>(p, std::max(max_dimension, 8) + 1));
  out.singular_values.assign(sv.begin(), sv.begin() + show);

  int kbest = -1;
  double best_ratio = gap_ratio;
  const int kmax = static_cast<int>(std::min<Eigen::Index>(max_dimension, p - 1));
  for (int k = 1; k <= kmax; ++k) {
    const double ratio = sv[k - 1] / sv[k];
    if (ratio < best_ratio) {
      best_ratio = ratio;
      kbest = k;
    }
  }
  if (kbest < 0) {
    if (sv[0] > out.noise_floor / gap_ratio) {
      out.dimension = 0;
      out.sigma_rejected_min = sv[0];
      out.certificate = sv[0] / std::max(out.noise_floor, std::numeric_limits<double>::min());
      out.basis.resize(ncols, 0);
      return out;
    }
    std::ostringstream os;
    os << "kernel dimension undecidable at this resolution: smallest singular values";
    for (int k = 0; k < std::min(show, 6); ++k) os << ' ' << sv[k];
    throw UndecidedError(os.str());
  }
  const Eigen::MatrixXd& Vfull = svd.matrixV();
  const int dim = kbest;
  out.dimension = dim;
  out.sigma_kept_max = sv[kbest - 1];
  out.sigma_rejected_min = sv[kbest];
  out.certificate = out.sigma_rejected_min / std::max(out.sigma_kept_max, out.noise_floor);
  // V columns are ordered by descending singular value; the kernel is the tail.
  out.basis = Vfull.rightCols(dim);
  return out;
}

}  // namespace solitonkit::grid
