#pragma once

// Closed-form model geometries: round spheres, flat tori and the compact
// rank-one symmetric spaces, together with their exact Laplace spectra.
//
// Spectrum tables start at k = 0 with the constant eigenfunction
// (eigenvalue 0, multiplicity 1). For HP^n and CaP^2 only the eigenvalues
// are known in closed form; multiplicities are left unknown.

#include <optional>
#include <string>
#include <vector>

#include "solitonkit/rational.hpp"

namespace solitonkit::model {

enum class ModelKind { round_sphere, flat_torus, cp1_killing, cpn_symbolic, hpn_spectral, cap2_spectral };

/// Normalization of the metric a spectrum refers to.
enum class MetricTag { normalized, killing, raw };

std::string to_string(ModelKind kind);
std::string to_string(MetricTag tag);
ModelKind parse_model_kind(const std::string& name);

struct ModelSpace {
  ModelKind kind{};
  int param_n = 0;   // n of S^n, T^n, CP^n, HP^n; 2 for CaP^2 and CP^1
  int real_dim = 0;
  // Squared radius for spheres (exact, so that spectra stay rational).
  Rational radius_sq{1};
  // Torus periods as multiples of 2*pi, L_i = 2*pi*q_i.
  std::vector<Rational> periods_over_2pi;
  bool antipodal_quotient = false;  // RP^n instead of S^n

  std::optional<Rational> einstein_constant;
  std::optional<double> volume;
  std::optional<double> diameter;
  std::optional<double> curv_min;
  std::optional<double> curv_max;
  MetricTag metric_tag = MetricTag::raw;

  std::string name() const;
  bool has_closed_form_spectrum() const;
};

ModelSpace round_sphere(int n, const Rational& radius_sq);
ModelSpace real_projective(int n, const Rational& radius_sq);
ModelSpace flat_torus(int n, const std::vector<Rational>& periods_over_2pi);
ModelSpace cp1_killing();
ModelSpace cpn_symbolic(int n);
ModelSpace hpn_spectral(int n);
ModelSpace cap2_spectral();

/// Generic factory used by the CLI. `params` are interpreted per kind:
/// round_sphere: {n, radius^2}; flat_torus: {n, q_1, ..., q_n}; cpn/hpn: {n}.
ModelSpace make_model(const std::string& name, const std::vector<Rational>& params);

struct SpectrumRow {
  int k = 0;
  Rational eigenvalue;
  std::optional<long long> multiplicity;
};

struct SpectrumTable {
  ModelSpace model;
  MetricTag metric_tag = MetricTag::raw;
  std::vector<SpectrumRow> rows;

  /// Largest eigenvalue present; spectra are increasing in k.
  const Rational& top() const { return rows.back().eigenvalue; }
};

SpectrumTable closed_form_spectrum(const ModelSpace& model, int k_max);

/// Exact membership of lambda in the spectrum. Throws InsufficientSpectrumError
/// (carrying the k_max needed) when the table stops at or below lambda.
bool spectrum_contains(const SpectrumTable& table, const Rational& lambda);

/// Eigenvalues of -Delta for the metric c*g are those of g divided by c.
SpectrumTable rescale(const SpectrumTable& table, const Rational& c, MetricTag new_tag);

/// CSV with header k,eigenvalue_num,eigenvalue_den,multiplicity,metric_tag.
std::string to_csv(const SpectrumTable& table);

}  // namespace solitonkit::model
