#pragma once

// Rigidity criteria as decision procedures.
//
//   spectral:  2 not in Spec(-lap) of the metric normalized to Ric = g  =>  Z = E
//   pinching:  Ric = g, K_min >= 1/n and K_min / K_max > (n - 2) / (3n)  =>  sol-rigid
//   diameter:  D(g) = d(g) ((1 / (n Vol)) int s mu)^{1/2} < 2 (sqrt 2 - 1) pi  =>  weakly rigid
//
// Outcomes only ever certify on exact arithmetic (closed-form spectra, rational pinching
// data) or on an explicitly labelled external input.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "solitonkit/field.hpp"
#include "solitonkit/model_spaces.hpp"
#include "solitonkit/rational.hpp"

namespace solitonkit::rigidity {

enum class Outcome { certifies, fails_to_certify, inapplicable };
enum class Overall { sol_rigid_certified, weakly_rigid_certified, undecided };

std::string to_string(Outcome o);
std::string to_string(Overall o);

struct CriterionResult {
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;
  Outcome outcome = Outcome::inapplicable;
  std::vector<std::string> evidence;
  bool external = false;  // rests on a cited result, not on a computation
};

struct RigidityVerdict {
  model::ModelSpace model;
  std::vector<CriterionResult> criteria;
  Overall overall = Overall::undecided;
};

/// Membership of 2 in the spectrum normalized to Ric = g, decided exactly. Also checks the same
/// question in the model's own normalization (2c in Spec for Ric = c g) and throws IntegrityError
/// if the two disagree. Inapplicable without a closed-form spectrum or a positive Einstein constant.
CriterionResult spectral_Z_equals_E(const model::ModelSpace& m);

/// n >= 2 (PreconditionError otherwise); nonpositive curvature is inapplicable;
/// K_min > K_max is a PreconditionError.
CriterionResult pinching_test(int n, const Rational& k_min, const Rational& k_max);

/// Threshold 2 (sqrt 2 - 1) pi.
double diameter_threshold();

struct DiameterValue {
  double value = 0.0;         // D
  double diameter = 0.0;
  double mean_scalar = 0.0;   // (1 / Vol) int s mu
  int dimension = 0;
  std::string method;         // "closed form" or "grid graph"
};

/// Closed form for spheres and RP^n; PreconditionError for models without a known diameter.
DiameterValue diameter_functional(const model::ModelSpace& m);
/// Shortest paths over the grid graph of all native nodes, edges to offsets with
/// max(|di|, |dj|) <= kGraphRadius and coprime components, lengths from the midpoint metric;
/// the two sphere charts are joined across their overlap. O(h) accurate.
inline constexpr int kGraphRadius = 3;
DiameterValue diameter_functional(const grid::MetricField& g);

/// Certifies iff D < threshold; inapplicable for nonpositive mean scalar curvature or an
/// unknown diameter.
CriterionResult diameter_test(const model::ModelSpace& m);
CriterionResult diameter_test(const grid::MetricField& g);

/// Case analysis for round spheres / RP^n, HP^n, CaP^2 and CP^n (n >= 2). CP^1 is treated as
/// the round 2-sphere. Throws PreconditionError for other models.
RigidityVerdict rank_one_verdict(const model::ModelSpace& m);

}  // namespace solitonkit::rigidity
