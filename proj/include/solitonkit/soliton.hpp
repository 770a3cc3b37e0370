#pragma once

// Perelman entropy, the soliton residual and its linearization on grid pairs (g, f).
//
//   W(g, f) = (2 pi)^{-n/2} int (|grad f|^2 / 2 + s / 2 + f - n) e^{-f} mu_g
//   S1      = Ric + hess f - g
//   S2      = lap f - |grad f|^2 / 2 + s / 2 + f - n - W(g, f)
// Pairs are normalized by (2 pi)^{-n/2} int e^{-f} mu_g = 1.

#include <optional>
#include <string>
#include <vector>

#include "solitonkit/operators.hpp"

namespace solitonkit {

using grid::CovectorField;
using grid::MetricField;
using grid::ScalarField;
using grid::SparseMatrix;
using grid::Sym2Field;
using grid::VectorField;

struct SolitonPair {
  MetricField g;
  ScalarField f;
  int n = 2;
};

struct ResidualPair {
  Sym2Field s1;
  ScalarField s2;
  double w = 0.0;
};

struct DeformationPair {
  Sym2Field h;
  ScalarField a;
};

/// (2 pi)^{-n/2} int e^{-f} mu_g.
double constraint_value(const SolitonPair& p);
/// Throws PreconditionError with the measured value when |constraint - 1| > tol.
void require_constraint(const SolitonPair& p, double tol = 1e-6);

double entropy_W(const SolitonPair& p, double tol = 1e-6);

/// Scales an Einstein metric with Ric = c g to Ric = g and sets f = log(Vol / (2 pi)^{n/2}).
/// `tol` bounds max |Ric - c g| relative to c; a negative value selects the resolution-aware default.
SolitonPair normalize_einstein(const MetricField& g, double c, double tol = -1.0);

/// Residuals of the soliton equations; does not require the constraint.
ResidualPair residual_S(const SolitonPair& p);

/// Default tolerance for "is a soliton" checks: 10 h^2 (1 + max |s|), with h the largest grid spacing
/// measured in the metric.
double soliton_tolerance(const SolitonPair& p);
/// Throws PreconditionError unless max |S1|, max |S2| are below tol (negative: default).
void require_soliton(const SolitonPair& p, double tol = -1.0);

/// c with Ric + hess f = c g, fitted over owned nodes. Throws PreconditionError unless c > 0 and
/// max |Ric + hess f - c g| <= tol (negative: the default soliton tolerance).
double shrinking_constant(const SolitonPair& p, double tol = -1.0);

/// Adds a constant to a so that int (tr h - 2a) e^{-f} mu_g = 0.
DeformationPair make_tangent(const SolitonPair& p, DeformationPair d);
double tangency_defect(const SolitonPair& p, const DeformationPair& d);

/// Central difference of S along (h, a) with the constraint restored by constant shifts of f.
ResidualPair fd_linearization(const SolitonPair& p, const DeformationPair& d, double eps);
/// Central difference of W along (h, a), constraint restored the same way.
double fd_entropy_derivative(const SolitonPair& p, const DeformationPair& d, double eps);

/// delta_f(Ric + hess f - g) - d(2 lap f - |grad f|^2 + s + 2 f) / 2. Valid for any (g, f).
CovectorField bianchi_residual(const MetricField& g, const ScalarField& f);
/// The two sides (delta_f S1, d(...) / 2) separately, for scaling the residual.
std::pair<CovectorField, CovectorField> bianchi_terms(const MetricField& g, const ScalarField& f);

/// Linearization of S at a soliton, as a block operator on (h, a) degrees of freedom.
class LinearizedS {
 public:
  /// check_base: reject bases that are not solitons within the default tolerance.
  explicit LinearizedS(const SolitonPair& p, bool check_base = true);

  /// dS1 = -lap_f h / 2 - R(h) - hess(u) / 2 + L_{(delta_f h)#} g / 2,
  /// dS2 = -(lap_f u + u - delta_f delta_f h) / 2, with u = tr h - 2a.
  std::pair<Sym2Field, ScalarField> apply(const DeformationPair& d) const;
  /// lap_f u + u - delta_f delta_f h, i.e. -2 dS2. Along tangent directions this is the
  /// form that enters the commutation identity below.
  ScalarField s2_operator(const DeformationPair& d) const;
  /// Half of the unsimplified first component:
  /// (-lap h - hess tr h + L_{(delta h)#} g - 2 R(h) + Ric o h + h o Ric - 2h + 2 hess a
  ///  + nabla_{grad f} h - [nabla h . grad f]) / 2.
  Sym2Field apply_unsimplified_s1(const DeformationPair& d) const;

  /// Rows: (S1 dofs, S2 dofs); columns: (h dofs, a dofs). Compositions are assembled in the
  /// full layout, so matrix() * dofs matches apply() on synced inputs.
  SparseMatrix matrix() const;
  const grid::GeometryPtr& geometry() const { return geo_; }

 private:
  grid::GeometryPtr geo_;
};

struct LinearizationSample {
  double eps = 0.0;
  double s1_error = 0.0;      // max over directions of max |fd dS1 - dS1| / max |dS1|
  double s2_error = 0.0;      // same for dS2
  double entropy_slope = 0.0;  // max |fd dW| over directions
};

struct LinearizationCheck {
  int resolution = 0;
  int directions = 0;
  std::vector<LinearizationSample> samples;  // one per eps
  double unsimplified_gap = 0.0;  // max |dS1 - apply_unsimplified_s1| / max |dS1|
  double matrix_gap = 0.0;        // max |matrix * dofs - apply| / max |apply|
  double combined(std::size_t i) const { return std::max(samples[i].s1_error, samples[i].s2_error); }
};

/// Compares LinearizedS with central differences of residual_S along `directions` seeded random
/// tangent directions (bandlimit 2, amplitude 1/2).
LinearizationCheck check_linearization(const SolitonPair& p, int directions, const std::vector<double>& eps,
                                       unsigned long long seed);

/// beta_c(h, u) = delta_f h - c du. beta_1 o S = 0 is the twisted Bianchi identity.
CovectorField op_beta(const grid::GeometryPtr& geo, const Sym2Field& h, const ScalarField& u, double c);
/// F(h, u) = (-lap_f h / 2 - R(h) - hess u / 2, lap_f u + u).
std::pair<Sym2Field, ScalarField> op_F(const grid::GeometryPtr& geo, const Sym2Field& h, const ScalarField& u);
/// G_c(w) = -delta_f(L_{w#} g) / 2 - c d delta_f w.
CovectorField op_G(const grid::GeometryPtr& geo, const CovectorField& w, double c);
/// Matrix assembly of G_c on degrees of freedom (compositions in the full layout).
SparseMatrix op_G_matrix(const grid::GeometryPtr& geo, double c);

struct BetaCalibration {
  double fitted_constant = 0.0;         // least-squares c* for delta_f S1 = c* dS2, averaged over samples
  double fitted_spread = 0.0;           // max |c*_i - mean|
  double residual_half = 0.0;           // max relative |beta_{1/2}(S)| over samples
  double residual_one = 0.0;            // max relative |beta_1(S)| over samples
  double calibrated_constant = 0.0;     // the candidate in {1/2, 1} with the smaller residual
  int samples = 0;
};

/// Evaluates beta_c o S on `samples` seeded random torus pairs (g, f) at the given resolution.
BetaCalibration calibrate_beta(int resolution, int samples, unsigned long long seed);

/// beta_c o F(h, tr h - 2a) = G_c(delta_f h) at a soliton holds for a single c. The residual is
/// A - c B with A = delta_f F1 + delta_f L_{w#} g / 2 and B = d F2 - d delta_f w, w = delta_f h.
struct CommutationCalibration {
  double fitted_constant = 0.0;       // least-squares c* from A = c* B, averaged over samples
  double fitted_spread = 0.0;
  double residual_half = 0.0;         // max relative residual at c = 1/2
  double residual_minus_half = 0.0;   // max relative residual at c = -1/2
  double calibrated_constant = 0.0;   // the candidate in {1/2, -1/2} with the smaller residual
  int samples = 0;
};

/// Random tangent directions (h, a) at the soliton p.
CommutationCalibration calibrate_commutation(const SolitonPair& p, int samples, unsigned long long seed);

}  // namespace solitonkit
