#include "solitonkit/soliton.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "solitonkit/random_fields.hpp"

namespace solitonkit {

using grid::FieldKind;
using grid::Geometry;
using grid::GeometryPtr;
using grid::make_geometry;

namespace {

double two_pi_pow(int n) { return std::pow(2.0 * std::numbers::pi, 0.5 * n); }

double w_value(const Geometry& geo, int n) {
  const auto& f = geo.potential();
  const auto gn = grid::grad_norm_sq(geo, f);
  const auto& s = geo.curvature().scalar;
  const auto integrand = ScalarField::sample(geo.atlas(), [&](int nd) {
    return ScalarField::Components{0.5 * gn(nd, 0) + 0.5 * s(nd, 0) + f(nd, 0) - n};
  });
  return grid::integrate(geo, integrand, true) / two_pi_pow(n);
}

double constraint_of(const Geometry& geo, int n) {
  return grid::integrate(geo, grid::constant_scalar(geo.atlas(), 1.0), true) / two_pi_pow(n);
}

// Largest grid spacing measured in the metric.
double metric_spacing(const Geometry& geo) {
  const auto& atlas = *geo.atlas();
  double hmax = 0.0;
  for (int nd : atlas.owned_nodes()) {
    const auto& G = geo.at(nd);
    for (int a = 0; a < 2; ++a) hmax = std::max(hmax, std::sqrt(G.g[a][a]) * atlas.spacing(a));
  }
  return hmax;
}

double default_tolerance(const Geometry& geo) {
  double smax = 0.0;
  for (int nd : geo.atlas()->owned_nodes()) smax = std::max(smax, std::abs(geo.at(nd).scalar));
  const double h = metric_spacing(geo);
  return 10.0 * h * h * (1.0 + smax);
}

ResidualPair residual_from(const GeometryPtr& geo, int n) {
  const auto& f = geo->potential();
  ResidualPair r;
  r.w = w_value(*geo, n);
  r.s1 = geo->curvature().ricci + grid::op_hessian(geo)(f) - geo->metric().tensor();
  const auto lap = grid::op_laplace(geo, false)(f);
  const auto gn = grid::grad_norm_sq(*geo, f);
  const auto& s = geo->curvature().scalar;
  r.s2 = ScalarField::sample(geo->atlas(), [&](int nd) {
    return ScalarField::Components{lap(nd, 0) - 0.5 * gn(nd, 0) + 0.5 * s(nd, 0) + f(nd, 0) - n - r.w};
  });
  return r;
}

// (g + eps h, f + eps a + c) with c restoring the constraint.
SolitonPair shifted_pair(const SolitonPair& p, const DeformationPair& d, double eps) {
  std::optional<MetricField> g;
  try {
    g.emplace(p.g.tensor() + eps * d.h);
  } catch (const PreconditionError& e) {
    std::ostringstream os;
    os << "endpoint metric is not positive definite at eps = " << eps << "; reduce eps (" << e.what() << ")";
    throw PreconditionError(os.str());
  }
  ScalarField f = p.f + eps * d.a;
  const Geometry geo(*g, f);
  const double c = std::log(constraint_of(geo, p.n));
  f = f + grid::constant_scalar(f.atlas(), c);
  return SolitonPair{*g, f, p.n};
}

}  // namespace

double constraint_value(const SolitonPair& p) { return constraint_of(Geometry(p.g, p.f), p.n); }

void require_constraint(const SolitonPair& p, double tol) {
  const double v = constraint_value(p);
  if (!(std::abs(v - 1.0) <= tol)) {
    std::ostringstream os;
    os.precision(12);
    os << "normalization constraint violated: (2 pi)^{-n/2} int e^{-f} mu_g = " << v;
    throw PreconditionError(os.str());
  }
}

double entropy_W(const SolitonPair& p, double tol) {
  require_constraint(p, tol);
  return w_value(Geometry(p.g, p.f), p.n);
}

SolitonPair normalize_einstein(const MetricField& g, double c, double tol) {
  if (!(c > 0.0)) throw PreconditionError("normalize_einstein: Einstein constant must be positive (shrinking case)");
  const Geometry geo(g);
  if (tol < 0.0) tol = default_tolerance(geo) / c;
  double dev = 0.0;
  for (int nd : g.atlas()->owned_nodes()) {
    const auto& G = geo.at(nd);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) dev = std::max(dev, std::abs(G.ricci[a][b] - c * G.g[a][b]) / c);
  }
  if (!(dev <= tol)) {
    std::ostringstream os;
    os << "normalize_einstein: metric is not Einstein with constant " << c << ", max |Ric - c g| / c = " << dev;
    throw PreconditionError(os.str());
  }
  MetricField gn(c * g.tensor());
  const Geometry geo_n(gn);
  const double vol = grid::integrate(geo_n, grid::constant_scalar(g.atlas(), 1.0), false);
  return SolitonPair{gn, grid::constant_scalar(g.atlas(), std::log(vol / two_pi_pow(2))), 2};
}

ResidualPair residual_S(const SolitonPair& p) {
  require_constraint(p, 1e-6);
  return residual_from(make_geometry(p.g, p.f), p.n);
}

double soliton_tolerance(const SolitonPair& p) { return default_tolerance(Geometry(p.g, p.f)); }

void require_soliton(const SolitonPair& p, double tol) {
  if (tol < 0.0) tol = soliton_tolerance(p);
  const auto r = residual_S(p);
  const double e1 = r.s1.max_norm(), e2 = r.s2.max_norm();
  if (!(e1 <= tol && e2 <= tol)) {
    std::ostringstream os;
    os << "base pair is not a normalized soliton: max|S1| = " << e1 << ", max|S2| = " << e2 << ", tolerance " << tol;
    throw PreconditionError(os.str());
  }
}

double shrinking_constant(const SolitonPair& p, double tol) {
  const auto geo = make_geometry(p.g, p.f);
  const Sym2Field t = geo->curvature().ricci + grid::op_hessian(geo)(p.f);
  double num = 0.0;
  int count = 0;
  for (int nd : geo->atlas()->owned_nodes()) {
    const auto& G = geo->at(nd);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) num += G.ginv[a][b] * t.sym(nd, a, b);
    count += 2;
  }
  const double c = num / count;
  if (tol < 0.0) tol = default_tolerance(*geo);
  double dev = 0.0;
  for (int nd : geo->atlas()->owned_nodes())
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) dev = std::max(dev, std::abs(t.sym(nd, a, b) - c * p.g(nd, a, b)));
  if (!(c > 0.0) || !(dev <= tol)) {
    std::ostringstream os;
    os << "base is not a gradient shrinking soliton: fitted c = " << c << ", max |Ric + hess f - c g| = " << dev
       << " (tolerance " << tol << ")";
    throw PreconditionError(os.str());
  }
  return c;
}

DeformationPair make_tangent(const SolitonPair& p, DeformationPair d) {
  const auto geo = make_geometry(p.g, p.f);
  const auto tr = grid::op_trace(geo)(d.h);
  const double mass = grid::integrate(*geo, grid::constant_scalar(p.g.atlas(), 1.0), true);
  const double defect = grid::integrate(*geo, tr - 2.0 * d.a, true);
  d.a = d.a + grid::constant_scalar(p.g.atlas(), 0.5 * defect / mass);
  return d;
}

double tangency_defect(const SolitonPair& p, const DeformationPair& d) {
  const auto geo = make_geometry(p.g, p.f);
  const auto tr = grid::op_trace(geo)(d.h);
  return grid::integrate(*geo, tr - 2.0 * d.a, true);
}

ResidualPair fd_linearization(const SolitonPair& p, const DeformationPair& d, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("fd_linearization: eps must be positive");
  const auto plus = residual_S(shifted_pair(p, d, eps));
  const auto minus = residual_S(shifted_pair(p, d, -eps));
  const double inv = 1.0 / (2.0 * eps);
  return ResidualPair{(plus.s1 - minus.s1) * inv, (plus.s2 - minus.s2) * inv, (plus.w - minus.w) * inv};
}

double fd_entropy_derivative(const SolitonPair& p, const DeformationPair& d, double eps) {
  const double wp = entropy_W(shifted_pair(p, d, eps));
  const double wm = entropy_W(shifted_pair(p, d, -eps));
  return (wp - wm) / (2.0 * eps);
}

std::pair<CovectorField, CovectorField> bianchi_terms(const MetricField& g, const ScalarField& f) {
  const auto geo = make_geometry(g, f);
  const Sym2Field s1 = geo->curvature().ricci + grid::op_hessian(geo)(f) - g.tensor();
  const auto lap = grid::op_laplace(geo, false)(f);
  const auto gn = grid::grad_norm_sq(*geo, f);
  const auto& s = geo->curvature().scalar;
  const auto q = ScalarField::sample(g.atlas(), [&](int nd) {
    return ScalarField::Components{2.0 * lap(nd, 0) - gn(nd, 0) + s(nd, 0) + 2.0 * f(nd, 0)};
  });
  return {grid::op_divergence(geo, true)(s1), 0.5 * grid::op_d(geo)(q)};
}

CovectorField bianchi_residual(const MetricField& g, const ScalarField& f) {
  auto [a, b] = bianchi_terms(g, f);
  return a - b;
}

LinearizedS::LinearizedS(const SolitonPair& p, bool check_base) : geo_(make_geometry(p.g, p.f)) {
  if (check_base) require_soliton(p);
}

std::pair<Sym2Field, ScalarField> LinearizedS::apply(const DeformationPair& d) const {
  const ScalarField u = grid::op_trace(geo_)(d.h) - 2.0 * d.a;
  const CovectorField dh = grid::op_divergence(geo_, true)(d.h);
  Sym2Field s1 = -0.5 * grid::op_rough_laplacian(geo_, true)(d.h) - grid::op_curvature_action(geo_)(d.h) -
                 0.5 * grid::op_hessian(geo_)(u) + 0.5 * grid::op_lie_metric_cov(geo_)(dh);
  return {s1, -0.5 * s2_operator(d)};
}

ScalarField LinearizedS::s2_operator(const DeformationPair& d) const {
  const ScalarField u = grid::op_trace(geo_)(d.h) - 2.0 * d.a;
  const CovectorField dh = grid::op_divergence(geo_, true)(d.h);
  return grid::op_laplace(geo_, true)(u) + u - grid::op_divergence_cov(geo_, true)(dh);
}

Sym2Field LinearizedS::apply_unsimplified_s1(const DeformationPair& d) const {
  const auto& h = d.h;
  const auto lap = grid::op_rough_laplacian(geo_, false)(h);
  const auto nabla_grad_f_h = lap - grid::op_rough_laplacian(geo_, true)(h);
  Sym2Field t = -1.0 * lap - grid::op_hessian(geo_)(grid::op_trace(geo_)(h)) +
                grid::op_lie_metric_cov(geo_)(grid::op_divergence(geo_, false)(h)) -
                2.0 * grid::op_curvature_action(geo_)(h) + grid::op_ricci_compose(geo_)(h) - 2.0 * h +
                2.0 * grid::op_hessian(geo_)(d.a) + nabla_grad_f_h - grid::op_bracket_grad_f(geo_)(h);
  return 0.5 * t;
}

SparseMatrix LinearizedS::matrix() const {
  const auto& atlas = *geo_->atlas();
  const int n = atlas.owned_count();
  const int nn = atlas.node_count();
  SparseMatrix I(nn, nn);
  I.setIdentity();
  const SparseMatrix Tr = grid::op_trace(geo_).full_matrix();
  const SparseMatrix Hs = grid::op_hessian(geo_).full_matrix();
  const SparseMatrix Lf = grid::op_rough_laplacian(geo_, true).full_matrix();
  const SparseMatrix R = grid::op_curvature_action(geo_).full_matrix();
  const SparseMatrix Df = grid::op_divergence(geo_, true).full_matrix();
  const SparseMatrix Lc = grid::op_lie_metric_cov(geo_).full_matrix();
  const SparseMatrix Ls = grid::op_laplace(geo_, true).full_matrix();
  const SparseMatrix Dc = grid::op_divergence_cov(geo_, true).full_matrix();

  const SparseMatrix LcDf = Lc * Df;
  const SparseMatrix HsTr = Hs * Tr;
  const SparseMatrix A11 = -0.5 * Lf - R + 0.5 * LcDf - 0.5 * HsTr;
  const SparseMatrix A12 = Hs;  // -hess(-2a)/2
  const SparseMatrix LsI = Ls + I;
  const SparseMatrix LsITr = LsI * Tr;
  const SparseMatrix DcDf = Dc * Df;
  const SparseMatrix A21 = -0.5 * (LsITr - DcDf);
  const SparseMatrix A22 = LsI;

  using grid::FieldKind;
  auto reduce = [&](const SparseMatrix& B, FieldKind out, FieldKind in) -> SparseMatrix {
    const SparseMatrix RB = atlas.restriction_matrix(out) * B;
    return RB * atlas.sync_matrix(in);
  };
  std::vector<Eigen::Triplet<double>> trip;
  auto put = [&](const SparseMatrix& B, int r0, int c0) {
    for (int r = 0; r < B.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(B, r); it; ++it) trip.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
  };
  put(reduce(A11, FieldKind::sym2, FieldKind::sym2), 0, 0);
  put(reduce(A12, FieldKind::sym2, FieldKind::scalar), 0, 3 * n);
  put(reduce(A21, FieldKind::scalar, FieldKind::sym2), 3 * n, 0);
  put(reduce(A22, FieldKind::scalar, FieldKind::scalar), 3 * n, 3 * n);
  SparseMatrix M(4 * n, 4 * n);
  M.setFromTriplets(trip.begin(), trip.end());
  M.prune(0.0);
  M.makeCompressed();
  return M;
}

LinearizationCheck check_linearization(const SolitonPair& p, int directions, const std::vector<double>& eps,
                                       unsigned long long seed) {
  if (directions < 1 || eps.empty()) throw PreconditionError("check_linearization: need directions and eps values");
  const auto atlas = p.g.atlas();
  LinearizedS L(p);
  const SparseMatrix M = L.matrix();
  LinearizationCheck out;
  out.resolution = atlas->resolution();
  out.directions = directions;
  for (double e : eps) out.samples.push_back({e, 0.0, 0.0, 0.0});
  grid::Rng rng(seed);
  for (int k = 0; k < directions; ++k) {
    DeformationPair d{grid::random_sym2(atlas, rng, 2, 0.5), grid::random_scalar(atlas, rng, 2, 0.5)};
    d = make_tangent(p, d);
    const auto lin = L.apply(d);
    const double n1 = lin.first.max_norm(), n2 = lin.second.max_norm();
    for (auto& smp : out.samples) {
      const auto fd = fd_linearization(p, d, smp.eps);
      smp.s1_error = std::max(smp.s1_error, (fd.s1 - lin.first).max_norm() / n1);
      smp.s2_error = std::max(smp.s2_error, (fd.s2 - lin.second).max_norm() / n2);
      smp.entropy_slope = std::max(smp.entropy_slope, std::abs(fd.w));
    }
    out.unsimplified_gap = std::max(out.unsimplified_gap, (L.apply_unsimplified_s1(d) - lin.first).max_norm() / n1);
    const DeformationPair ds{d.h.synced(), d.a.synced()};
    const auto lin_s = L.apply(ds);
    Eigen::VectorXd x(ds.h.dofs().size() + ds.a.dofs().size());
    x << ds.h.dofs(), ds.a.dofs();
    Eigen::VectorXd y(x.size());
    y << lin_s.first.dofs(), lin_s.second.dofs();
    out.matrix_gap = std::max(out.matrix_gap, (M * x - y).cwiseAbs().maxCoeff() / y.cwiseAbs().maxCoeff());
  }
  return out;
}

CovectorField op_beta(const GeometryPtr& geo, const Sym2Field& h, const ScalarField& u, double c) {
  return grid::op_divergence(geo, true)(h) - c * grid::op_d(geo)(u);
}

std::pair<Sym2Field, ScalarField> op_F(const GeometryPtr& geo, const Sym2Field& h, const ScalarField& u) {
  Sym2Field a = -0.5 * grid::op_rough_laplacian(geo, true)(h) - grid::op_curvature_action(geo)(h) -
                0.5 * grid::op_hessian(geo)(u);
  ScalarField b = grid::op_laplace(geo, true)(u) + u;
  return {a, b};
}

CovectorField op_G(const GeometryPtr& geo, const CovectorField& w, double c) {
  return -0.5 * grid::op_divergence(geo, true)(grid::op_lie_metric_cov(geo)(w)) -
         c * grid::op_d(geo)(grid::op_divergence_cov(geo, true)(w));
}

SparseMatrix op_G_matrix(const GeometryPtr& geo, double c) {
  const auto& atlas = *geo->atlas();
  const SparseMatrix Df = grid::op_divergence(geo, true).full_matrix();
  const SparseMatrix Lc = grid::op_lie_metric_cov(geo).full_matrix();
  const SparseMatrix D = grid::op_d(geo).full_matrix();
  const SparseMatrix Dc = grid::op_divergence_cov(geo, true).full_matrix();
  const SparseMatrix DfLc = Df * Lc;
  const SparseMatrix DDc = D * Dc;
  const SparseMatrix G = -0.5 * DfLc - c * DDc;
  const SparseMatrix RG = atlas.restriction_matrix(grid::FieldKind::covector) * G;
  SparseMatrix M = RG * atlas.sync_matrix(grid::FieldKind::covector);
  M.prune(0.0);
  M.makeCompressed();
  return M;
}

BetaCalibration calibrate_beta(int resolution, int samples, unsigned long long seed) {
  if (samples < 1) throw PreconditionError("calibrate_beta: needs at least one sample");
  BetaCalibration out;
  out.samples = samples;
  grid::Rng rng(seed);
  const double L = 2.0 * std::numbers::pi;
  const auto atlas = grid::ChartAtlas::torus(resolution, L, L);
  std::vector<double> fits;
  for (int k = 0; k < samples; ++k) {
    const MetricField g = grid::random_conformal_metric(atlas, rng, 2, 0.2);
    ScalarField f = grid::random_scalar(atlas, rng, 2, 0.4);
    const Geometry geo0(g, f);
    f = f + grid::constant_scalar(atlas, std::log(constraint_of(geo0, 2)));
    const auto geo = make_geometry(g, f);
    const auto r = residual_from(geo, 2);
    const Eigen::VectorXd div = grid::op_divergence(geo, true)(r.s1).dofs();
    const Eigen::VectorXd ds2 = grid::op_d(geo)(r.s2).dofs();
    fits.push_back(div.dot(ds2) / ds2.dot(ds2));
    const double scale = ds2.cwiseAbs().maxCoeff();
    out.residual_half = std::max(out.residual_half, (div - 0.5 * ds2).cwiseAbs().maxCoeff() / scale);
    out.residual_one = std::max(out.residual_one, (div - ds2).cwiseAbs().maxCoeff() / scale);
  }
  double mean = 0.0;
  for (double c : fits) mean += c;
  mean /= static_cast<double>(fits.size());
  out.fitted_constant = mean;
  for (double c : fits) out.fitted_spread = std::max(out.fitted_spread, std::abs(c - mean));
  out.calibrated_constant = out.residual_one < out.residual_half ? 1.0 : 0.5;
  return out;
}

CommutationCalibration calibrate_commutation(const SolitonPair& p, int samples, unsigned long long seed) {
  if (samples < 1) throw PreconditionError("calibrate_commutation: needs at least one sample");
  require_soliton(p);
  CommutationCalibration out;
  out.samples = samples;
  const auto geo = make_geometry(p.g, p.f);
  const auto& atlas = p.g.atlas();
  grid::Rng rng(seed);
  std::vector<double> fits;
  for (int k = 0; k < samples; ++k) {
    DeformationPair d{grid::random_sym2(atlas, rng, 2, 0.5), grid::random_scalar(atlas, rng, 2, 0.5)};
    d = make_tangent(p, d);
    const ScalarField u = grid::op_trace(geo)(d.h) - 2.0 * d.a;
    const auto F = op_F(geo, d.h, u);
    const CovectorField w = grid::op_divergence(geo, true)(d.h);
    const Eigen::VectorXd A =
        (grid::op_divergence(geo, true)(F.first) + 0.5 * grid::op_divergence(geo, true)(grid::op_lie_metric_cov(geo)(w)))
            .dofs();
    const Eigen::VectorXd B =
        (grid::op_d(geo)(F.second) - grid::op_d(geo)(grid::op_divergence_cov(geo, true)(w))).dofs();
    fits.push_back(A.dot(B) / B.dot(B));
    const double scale = std::max(A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
    out.residual_half = std::max(out.residual_half, (A - 0.5 * B).cwiseAbs().maxCoeff() / scale);
    out.residual_minus_half = std::max(out.residual_minus_half, (A + 0.5 * B).cwiseAbs().maxCoeff() / scale);
  }
  double mean = 0.0;
  for (double c : fits) mean += c;
  mean /= static_cast<double>(fits.size());
  out.fitted_constant = mean;
  for (double c : fits) out.fitted_spread = std::max(out.fitted_spread, std::abs(c - mean));
  out.calibrated_constant = out.residual_minus_half < out.residual_half ? -0.5 : 0.5;
  return out;
}

}  // namespace solitonkit
