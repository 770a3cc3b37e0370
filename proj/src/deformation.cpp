#include "solitonkit/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

namespace solitonkit {

using grid::FieldKind;
using grid::Geometry;
using grid::GeometryPtr;
using grid::make_geometry;

namespace {

// Block-diagonal R on owned dofs with |R x|^2 = sum_n w_n x_n^T P_n x_n, w_n = sqrt(det g) h^2 e^{-f}.
SparseMatrix node_root(const Geometry& geo, FieldKind kind, bool inverse) {
  const auto& atlas = *geo.atlas();
  const int nc = grid::component_count(kind);
  std::vector<Eigen::Triplet<double>> trip;
  const auto& owned = atlas.owned_nodes();
  for (int k = 0; k < atlas.owned_count(); ++k) {
    const int nd = owned[k];
    const auto& G = geo.at(nd);
    const double w = G.sqrt_det * atlas.cell_area() * std::exp(-geo.potential()(nd, 0));
    const Eigen::MatrixXd P = w * grid::pointwise_pairing(G, kind);
    const Eigen::MatrixXd U = P.llt().matrixU();
    const Eigen::MatrixXd B = inverse ? Eigen::MatrixXd(U.inverse()) : U;
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j)
        if (B(i, j) != 0.0) trip.emplace_back(k * nc + i, k * nc + j, B(i, j));
  }
  SparseMatrix R(atlas.owned_count() * nc, atlas.owned_count() * nc);
  R.setFromTriplets(trip.begin(), trip.end());
  return R;
}

struct Block {
  SparseMatrix op;
  FieldKind out;
};

// Dense stacked [R_out_i * op_i * R_in^{-1}].
Eigen::MatrixXd stack(const Geometry& geo, const std::vector<Block>& blocks, const SparseMatrix& rin_inv) {
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.op.rows();
  Eigen::MatrixXd A(rows, rin_inv.cols());
  Eigen::Index r0 = 0;
  for (const auto& b : blocks) {
    const SparseMatrix Ro = node_root(geo, b.out, false);
    const SparseMatrix RA = Ro * b.op;
    const SparseMatrix W = RA * rin_inv;
    A.middleRows(r0, W.rows()) = Eigen::MatrixXd(W);
    r0 += W.rows();
  }
  return A;
}

bool constant_potential(const ScalarField& f) {
  double lo = 1e300, hi = -1e300;
  for (int nd : f.atlas()->owned_nodes()) {
    lo = std::min(lo, f(nd, 0));
    hi = std::max(hi, f(nd, 0));
  }
  return hi - lo <= 1e-10 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
}

void fill_from_kernel(KernelBasis& out, const grid::NearKernel& nk) {
  out.spectrum = nk.singular_values;
  out.sigma_kept_max = nk.sigma_kept_max;
  out.sigma_rejected_min = nk.sigma_rejected_min;
  out.certificate = nk.certificate;
}

KernelBasis solve_stacked(KernelBasis out, const GeometryPtr& geo, const std::vector<Block>& blocks,
                          const KernelOptions& opt, const std::function<ScalarField(const Sym2Field&)>& second_slot) {
  const SparseMatrix rin_inv = node_root(*geo, FieldKind::sym2, true);
  const Eigen::MatrixXd A = stack(*geo, blocks, rin_inv);
  grid::NearKernel nk;
  try {
    nk = grid::near_kernel(A, opt.gap_ratio, opt.max_dimension);
  } catch (const UndecidedError& e) {
    out.undecided = true;
    out.note = e.what();
    return out;
  }
  fill_from_kernel(out, nk);
  const auto& atlas = geo->atlas();
  for (int k = 0; k < nk.dimension; ++k) {
    const Eigen::VectorXd x = rin_inv * nk.basis.col(k);
    const Sym2Field h = Sym2Field::from_dofs(atlas, x);
    out.elements.push_back(DeformationPair{h, second_slot(h)});
  }
  return out;
}

}  // namespace

std::vector<double> z_residuals(const SolitonPair& p, const DeformationPair& d) {
  const auto geo = make_geometry(p.g, p.f);
  const auto& h = d.h;
  return {grid::op_divergence(geo, true)(h).max_norm(),
          (0.5 * grid::op_rough_laplacian(geo, true)(h) + grid::op_curvature_action(geo)(h)).max_norm(),
          (d.a - 0.5 * grid::op_trace(geo)(h)).max_norm()};
}

std::vector<double> e_residuals(const SolitonPair& p, const DeformationPair& d) {
  const auto geo = make_geometry(p.g);
  const auto& h = d.h;
  return {grid::op_divergence(geo, false)(h).max_norm(), grid::op_trace(geo)(h).max_norm(),
          (grid::op_rough_laplacian(geo, false)(h) + 2.0 * grid::op_curvature_action(geo)(h)).max_norm(),
          d.a.max_norm()};
}

KernelBasis compute_Z(const SolitonPair& p, const KernelOptions& opt) {
  require_soliton(p);
  const auto geo = make_geometry(p.g, p.f);
  KernelBasis out("Z", p);
  out.equations = {"delta_f h", "lap_f h / 2 + R(h)", "a - tr h / 2"};
  const SparseMatrix P =
      0.5 * grid::op_rough_laplacian(geo, true).matrix() + grid::op_curvature_action(geo).matrix();
  const SparseMatrix Q = grid::op_divergence(geo, true).matrix();
  const auto tr = grid::op_trace(geo);
  out = solve_stacked(std::move(out), geo, {{P, FieldKind::sym2}, {Q, FieldKind::covector}}, opt,
                      [&](const Sym2Field& h) { return 0.5 * tr(h); });
  for (const auto& d : out.elements) out.residual_norms.push_back(z_residuals(p, d));
  return out;
}

KernelBasis compute_E(const SolitonPair& p, const KernelOptions& opt) {
  if (!constant_potential(p.f))
    throw PreconditionError("compute_E: f is not constant; E is defined only at Einstein points");
  shrinking_constant(p);
  const auto geo = make_geometry(p.g, p.f);
  KernelBasis out("E", p);
  out.equations = {"delta h", "tr h", "lap h + 2 R(h)", "a"};
  const SparseMatrix P =
      grid::op_rough_laplacian(geo, false).matrix() + 2.0 * grid::op_curvature_action(geo).matrix();
  const SparseMatrix Q = grid::op_divergence(geo, false).matrix();
  const SparseMatrix T = grid::op_trace(geo).matrix();
  const auto atlas = p.g.atlas();
  out = solve_stacked(std::move(out), geo,
                      {{P, FieldKind::sym2}, {Q, FieldKind::covector}, {T, FieldKind::scalar}}, opt,
                      [&](const Sym2Field&) { return ScalarField(atlas); });
  for (const auto& d : out.elements) out.residual_norms.push_back(e_residuals(p, d));
  return out;
}

RefinedKernel refine_kernel(const std::function<SolitonPair(int)>& base, const std::vector<int>& resolutions,
                            const std::function<KernelBasis(const SolitonPair&)>& solve) {
  if (resolutions.size() < 2) throw PreconditionError("refine_kernel: needs at least two resolutions");
  RefinedKernel out;
  bool any_undecided = false;
  for (int n : resolutions) {
    KernelBasis k = solve(base(n));
    out.resolutions.push_back(n);
    out.dimensions.push_back(k.undecided ? -1 : k.dimension());
    any_undecided = any_undecided || k.undecided;
    out.runs.push_back(std::move(k));
  }
  out.stable = !any_undecided && std::all_of(out.dimensions.begin(), out.dimensions.end(),
                                             [&](int d) { return d == out.dimensions.front(); });
  auto& last = out.runs.back();
  if (!out.stable && !last.undecided) {
    last.undecided = true;
    std::ostringstream os;
    os << "kernel dimension not resolution-stable:";
    for (std::size_t i = 0; i < resolutions.size(); ++i) os << " N=" << resolutions[i] << " dim " << out.dimensions[i];
    last.note = os.str();
  }
  return out;
}

SliceProjector::SliceProjector(const grid::MetricField& g, const ScalarField& f) : geo_(make_geometry(g, f)) {
  const auto& atlas = *geo_->atlas();
  const SparseMatrix Lie = grid::op_lie_metric(geo_).full_matrix();
  const SparseMatrix Div = grid::op_divergence(geo_, true).full_matrix();
  const SparseMatrix DL = Div * Lie;
  const SparseMatrix RDL = atlas.restriction_matrix(FieldKind::covector) * DL;
  const SparseMatrix P = RDL * atlas.sync_matrix(FieldKind::vector);
  rc_ = node_root(*geo_, FieldKind::covector, false);
  rc_inv_ = node_root(*geo_, FieldKind::covector, true);
  rx_inv_ = node_root(*geo_, FieldKind::vector, true);
  const SparseMatrix W = rc_ * P * rx_inv_;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(W), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int n = static_cast<int>(sv.size());
  // Exact kernel, then the trailing cluster separated by the largest relative gap (discrete
  // Killing fields, annihilated only up to truncation error).
  int k = 0;
  while (k < n && sv(n - 1 - k) <= kSliceKernelThreshold * sv(0)) ++k;
  double best = kKillingGap;
  for (int j = 1; j <= std::min(kKillingSearch, n - 1); ++j) {
    const double ratio = sv(n - j) / sv(n - j - 1);
    if (ratio < best) {
      best = ratio;
      k = std::max(k, j);
    }
  }
  deflated_ = k;
  const int r = n - k;
  U_ = svd.matrixU().leftCols(r);
  V_ = svd.matrixV().leftCols(r);
  sigma_ = sv.head(r);
  Uk_ = svd.matrixU().rightCols(k);
}

SliceSplit SliceProjector::project(const Sym2Field& h) const {
  const auto& atlas = geo_->atlas();
  const auto div = grid::op_divergence(geo_, true);
  const auto lie = grid::op_lie_metric(geo_);
  SliceSplit s;
  s.h = h;
  s.deflated = deflated_;
  const grid::CovectorField dh = div(h);
  const Eigen::VectorXd rw = rc_ * dh.dofs();
  const Eigen::VectorXd y = V_ * (U_.transpose() * rw).cwiseQuotient(sigma_);
  s.X = grid::VectorField::from_dofs(atlas, rx_inv_ * y);
  const Sym2Field lx = lie(s.X);
  s.h1 = h - lx;

  const auto max_abs = [](const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
  const double dmax = dh.max_norm();
  const double scale = dmax > 0.0 ? dmax : 1.0;
  const Eigen::VectorXd r1 = rc_ * div(s.h1).dofs();
  const Eigen::VectorXd killing = Uk_ * (Uk_.transpose() * r1);
  s.divergence = max_abs(rc_inv_ * (r1 - killing)) / scale;
  s.killing_defect = max_abs(rc_inv_ * killing) / scale;
  const double n1 = std::sqrt(grid::inner(*geo_, lx, lx, true)), n2 = std::sqrt(grid::inner(*geo_, s.h1, s.h1, true));
  s.orthogonality = (n1 > 0.0 && n2 > 0.0) ? std::abs(grid::inner(*geo_, lx, s.h1, true)) / (n1 * n2) : 0.0;
  return s;
}

SliceSplit slice_project(const SolitonPair& p, const Sym2Field& h) {
  return SliceProjector(p.g, p.f).project(h);
}

TraceGap trace_spectral_gap(const SolitonPair& p) {
  TraceGap out;
  out.constant = shrinking_constant(p);
  const auto geo = make_geometry(p.g, p.f);
  const SparseMatrix L = -1.0 * grid::op_laplace(geo, true).matrix();
  const auto r = grid::eigensolve(L, 6, -0.5 * out.constant);
  double best = 1e300;
  for (Eigen::Index i = 0; i < r.values.size(); ++i) {
    // Constants are annihilated exactly; skip them.
    if (std::abs(r.values(i)) <= 1e-8 * out.constant) continue;
    best = std::min(best, r.values(i));
  }
  out.value = best;
  out.certifies = best > out.constant;
  return out;
}

CpFamily cp_family(int resolution, const KernelOptions& opt) {
  const auto atlas = grid::ChartAtlas::sphere(resolution);
  const auto g = grid::round_sphere_metric(atlas, 2.0);
  const auto geo0 = make_geometry(g);
  const double vol = grid::integrate(*geo0, grid::constant_scalar(atlas, 1.0), false);
  const SolitonPair base{g, grid::constant_scalar(atlas, std::log(vol / (2.0 * std::numbers::pi))), 2};
  const auto geo = make_geometry(g);

  CpFamily out(KernelBasis("cp_family", base));
  out.resolution = resolution;
  out.basis.equations = {"delta h", "lap h + 2 R(h)"};

  // Full-layout eigenproblem: each chart satisfies the stencil equation on its whole native
  // region, so eigenfunctions carry one smooth truncation error per chart and survive the
  // fourth-order compositions below.
  const SparseMatrix L = -1.0 * grid::op_laplace(geo, false).full_matrix();
  const int count = 8;
  const auto r = grid::eigensolve(L, count, 1.05);
  std::vector<int> order(count);
  for (int i = 0; i < count; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(r.values(a) - 1.0) < std::abs(r.values(b) - 1.0); });
  std::vector<double> dist;
  for (int i : order) {
    dist.push_back(std::abs(r.values(i) - 1.0));
    out.eigenvalues.push_back(r.values(i));
  }
  out.basis.spectrum = dist;
  int k = 0;
  double best = 1.0;
  for (int i = 1; i < count; ++i) {
    const double ratio = dist[i - 1] / dist[i];
    if (ratio < opt.gap_ratio && ratio < best) {
      best = ratio;
      k = i;
    }
  }
  if (k == 0) {
    std::ostringstream os;
    os << "kernel dimension undecidable at this resolution: eigenvalues of -lap near 1 have no gap (N = "
       << resolution << ", smallest distances " << dist[0] << ", " << dist[1] << ", " << dist[2] << ", " << dist[3]
       << ")";
    throw UndecidedError(os.str());
  }
  out.basis.sigma_kept_max = dist[k - 1];
  out.basis.sigma_rejected_min = dist[k];
  out.basis.certificate = dist[k] / dist[k - 1];
  if (k != 3) {
    std::ostringstream os;
    os << "eigenvalue-1 space of -lap has dimension " << k << " at N = " << resolution << ", expected 3";
    throw UndecidedError(os.str());
  }

  // Orthonormal basis of F in L2(mu_g).
  std::vector<ScalarField> fs;
  for (int i = 0; i < k; ++i) {
    ScalarField v = ScalarField::from_full(atlas, r.vectors.col(order[i]));
    for (const auto& q : fs) v -= grid::inner(*geo, q, v, false) * q;
    v *= 1.0 / std::sqrt(grid::inner(*geo, v, v, false));
    fs.push_back(v);
  }

  const auto hess = grid::op_hessian(geo);
  const auto times_g = grid::op_times_metric(geo);
  const auto div = grid::op_divergence(geo, false);
  const auto lap = grid::op_rough_laplacian(geo, false);
  const auto curv = grid::op_curvature_action(geo);
  const auto d = grid::op_d(geo);
  const auto tr = grid::op_trace(geo);
  for (const auto& f : fs) {
    const Sym2Field H = hess(f);
    const Sym2Field h = H + 0.5 * times_g(f);
    CpElement e;
    e.delta_h = div(h).max_norm();
    e.lich = (lap(h) + 2.0 * curv(h)).max_norm();
    e.hess_divergence = (div(H) + 0.5 * d(f)).max_norm();
    e.hess_lich = (lap(H) + 2.0 * curv(H)).max_norm();
    e.hess_norm = H.max_norm();
    e.degeneracy = std::sqrt(grid::inner(*geo, h, h, false) / grid::inner(*geo, H, H, false));
    out.checks.push_back(e);
    out.basis.elements.push_back(DeformationPair{h, 0.5 * tr(h)});
    out.basis.residual_norms.push_back({e.delta_h, e.lich});
  }
  return out;
}

}  // namespace solitonkit
