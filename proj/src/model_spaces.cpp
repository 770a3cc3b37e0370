#include "solitonkit/model_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "solitonkit/errors.hpp"

namespace solitonkit {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw PreconditionError("empty rational literal");
  if (auto slash = text.find('/'); slash != std::string::npos) {
    return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
  }
  if (auto dot = text.find('.'); dot != std::string::npos) {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    if (digits.empty() || digits == "-") throw PreconditionError("bad decimal: " + text);
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    return Rational(BigInt(digits), den);
  }
  return Rational(BigInt(text));
}

namespace model {

namespace {

constexpr int kMaxSphereDim = 8;
constexpr int kMaxCpnDim = 8;
constexpr int kMaxHpnDim = 4;
constexpr int kMaxTorusDim = 4;

long long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double sphere_area(int n, double radius) {
  // |S^n(r)| = 2 pi^{(n+1)/2} / Gamma((n+1)/2) r^n
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1)) * std::pow(radius, n);
}

MetricTag einstein_tag(const std::optional<Rational>& c) {
  if (!c) return MetricTag::raw;
  if (*c == 1) return MetricTag::normalized;
  if (*c == make_rational(1, 2)) return MetricTag::killing;
  return MetricTag::raw;
}

// Eigenvalue of the k-th row for the formula families.
Rational formula_eigenvalue(const ModelSpace& m, int k) {
  const Rational kk(k);
  switch (m.kind) {
    case ModelKind::round_sphere: {
      const int degree = m.antipodal_quotient ? 2 * k : k;
      return Rational(degree) * Rational(degree + m.param_n - 1) / m.radius_sq;
    }
    case ModelKind::cp1_killing:
      return kk * (kk + 1) / 2;
    case ModelKind::hpn_spectral:
      return (kk * kk + kk * (2 * m.param_n + 1)) / (2 * (m.param_n + 2));
    case ModelKind::cap2_spectral:
      return (kk * kk + 11 * kk) / 18;
    default:
      throw PreconditionError("no eigenvalue formula for " + m.name());
  }
}

std::optional<long long> formula_multiplicity(const ModelSpace& m, int k) {
  switch (m.kind) {
    case ModelKind::round_sphere: {
      const int n = m.param_n;
      const int d = m.antipodal_quotient ? 2 * k : k;
      return binomial(n + d, n) - binomial(n + d - 2, n);
    }
    case ModelKind::cp1_killing:
      return 2 * k + 1;
    default:
      return std::nullopt;
  }
}

void enumerate_torus(const std::vector<Rational>& q, std::size_t axis, const Rational& partial, double bound,
                     std::map<Rational, long long>& out) {
  if (axis == q.size()) {
    out[partial] += 1;
    return;
  }
  const double qd = to_double(q[axis]);
  const double remaining = bound - to_double(partial);
  if (remaining < -1e-12) return;
  const long long mmax = static_cast<long long>(std::floor(qd * std::sqrt(std::max(0.0, remaining)) + 1e-9));
  for (long long m = -mmax; m <= mmax; ++m) {
    Rational term = Rational(m * m) / (q[axis] * q[axis]);
    Rational next = partial + term;
    if (to_double(next) > bound + 1e-9) continue;
    enumerate_torus(q, axis + 1, next, bound, out);
  }
}

SpectrumTable torus_spectrum(const ModelSpace& m, int k_max) {
  double bound = 1.0;
  for (;;) {
    std::map<Rational, long long> values;
    enumerate_torus(m.periods_over_2pi, 0, Rational(0), bound, values);
    // Values up to `bound` are complete; only keep those safely below it.
    std::vector<std::pair<Rational, long long>> complete;
    for (auto& [v, mult] : values)
      if (to_double(v) <= bound) complete.emplace_back(v, mult);
    if (static_cast<int>(complete.size()) > k_max) {
      SpectrumTable t{m, MetricTag::raw, {}};
      for (int k = 0; k <= k_max; ++k) t.rows.push_back({k, complete[k].first, complete[k].second});
      return t;
    }
    bound *= 2.0;
  }
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::round_sphere: return "round_sphere";
    case ModelKind::flat_torus: return "flat_torus";
    case ModelKind::cp1_killing: return "cp1_killing";
    case ModelKind::cpn_symbolic: return "cpn_symbolic";
    case ModelKind::hpn_spectral: return "hpn_spectral";
    case ModelKind::cap2_spectral: return "cap2_spectral";
  }
  return "unknown";
}

std::string to_string(MetricTag tag) {
  switch (tag) {
    case MetricTag::normalized: return "normalized";
    case MetricTag::killing: return "killing";
    case MetricTag::raw: return "raw";
  }
  return "raw";
}

ModelKind parse_model_kind(const std::string& name) {
  static const std::map<std::string, ModelKind> names{
      {"round_sphere", ModelKind::round_sphere}, {"sphere", ModelKind::round_sphere},
      {"flat_torus", ModelKind::flat_torus},     {"torus", ModelKind::flat_torus},
      {"cp1_killing", ModelKind::cp1_killing},   {"cp1", ModelKind::cp1_killing},
      {"cpn_symbolic", ModelKind::cpn_symbolic}, {"cpn", ModelKind::cpn_symbolic},
      {"hpn_spectral", ModelKind::hpn_spectral}, {"hpn", ModelKind::hpn_spectral},
      {"cap2_spectral", ModelKind::cap2_spectral}, {"cap2", ModelKind::cap2_spectral}};
  auto it = names.find(name);
  if (it == names.end()) throw PreconditionError("unsupported model name: " + name);
  return it->second;
}

std::string ModelSpace::name() const {
  std::ostringstream os;
  switch (kind) {
    case ModelKind::round_sphere:
      os << (antipodal_quotient ? "RP" : "S") << param_n << "(r^2=" << solitonkit::to_string(radius_sq) << ")";
      break;
    case ModelKind::flat_torus: os << "T" << param_n; break;
    case ModelKind::cp1_killing: os << "CP1(killing)"; break;
    case ModelKind::cpn_symbolic: os << "CP" << param_n; break;
    case ModelKind::hpn_spectral: os << "HP" << param_n; break;
    case ModelKind::cap2_spectral: os << "CaP2"; break;
  }
  return os.str();
}

bool ModelSpace::has_closed_form_spectrum() const { return kind != ModelKind::cpn_symbolic; }

ModelSpace round_sphere(int n, const Rational& radius_sq) {
  if (n < 1 || n > kMaxSphereDim)
    throw PreconditionError("round_sphere: dimension must lie in [1, " + std::to_string(kMaxSphereDim) + "]");
  if (radius_sq <= 0) throw PreconditionError("round_sphere: radius must be positive");
  ModelSpace m;
  m.kind = ModelKind::round_sphere;
  m.param_n = n;
  m.real_dim = n;
  m.radius_sq = radius_sq;
  const double r = std::sqrt(to_double(radius_sq));
  m.einstein_constant = Rational(n - 1) / radius_sq;
  m.volume = sphere_area(n, r);
  m.diameter = std::numbers::pi * r;
  m.curv_min = m.curv_max = 1.0 / to_double(radius_sq);
  m.metric_tag = einstein_tag(m.einstein_constant);
  return m;
}

ModelSpace real_projective(int n, const Rational& radius_sq) {
  ModelSpace m = round_sphere(n, radius_sq);
  m.antipodal_quotient = true;
  m.volume = *m.volume / 2.0;
  m.diameter = *m.diameter / 2.0;
  return m;
}

ModelSpace flat_torus(int n, const std::vector<Rational>& periods_over_2pi) {
  if (n < 1 || n > kMaxTorusDim)
    throw PreconditionError("flat_torus: dimension must lie in [1, " + std::to_string(kMaxTorusDim) + "]");
  if (static_cast<int>(periods_over_2pi.size()) != n)
    throw PreconditionError("flat_torus: need exactly n periods");
  ModelSpace m;
  m.kind = ModelKind::flat_torus;
  m.param_n = n;
  m.real_dim = n;
  m.periods_over_2pi = periods_over_2pi;
  double vol = 1.0, diam_sq = 0.0;
  for (const auto& q : periods_over_2pi) {
    if (q <= 0) throw PreconditionError("flat_torus: periods must be positive");
    const double len = 2.0 * std::numbers::pi * to_double(q);
    vol *= len;
    diam_sq += 0.25 * len * len;
  }
  m.einstein_constant = Rational(0);
  m.volume = vol;
  m.diameter = std::sqrt(diam_sq);
  m.curv_min = m.curv_max = 0.0;
  m.metric_tag = MetricTag::raw;
  return m;
}

ModelSpace cp1_killing() {
  // The sphere of radius sqrt(2): Ric = g/2.
  ModelSpace m = round_sphere(2, Rational(2));
  m.kind = ModelKind::cp1_killing;
  m.param_n = 1;
  m.metric_tag = MetricTag::killing;
  return m;
}

ModelSpace cpn_symbolic(int n) {
  if (n < 2 || n > kMaxCpnDim)
    throw PreconditionError("cpn_symbolic: n must lie in [2, " + std::to_string(kMaxCpnDim) + "]");
  ModelSpace m;
  m.kind = ModelKind::cpn_symbolic;
  m.param_n = n;
  m.real_dim = 2 * n;
  m.einstein_constant = make_rational(1, 2);
  m.metric_tag = MetricTag::killing;
  return m;
}

ModelSpace hpn_spectral(int n) {
  if (n < 1 || n > kMaxHpnDim)
    throw PreconditionError("hpn_spectral: n must lie in [1, " + std::to_string(kMaxHpnDim) + "]");
  ModelSpace m;
  m.kind = ModelKind::hpn_spectral;
  m.param_n = n;
  m.real_dim = 4 * n;
  m.einstein_constant = make_rational(1, 2);
  m.metric_tag = MetricTag::killing;
  return m;
}

ModelSpace cap2_spectral() {
  ModelSpace m;
  m.kind = ModelKind::cap2_spectral;
  m.param_n = 2;
  m.real_dim = 16;
  m.einstein_constant = make_rational(1, 2);
  m.metric_tag = MetricTag::killing;
  return m;
}

ModelSpace make_model(const std::string& name, const std::vector<Rational>& params) {
  auto int_param = [&](std::size_t i) {
    if (i >= params.size()) throw PreconditionError("make_model: missing parameter " + std::to_string(i));
    if (denominator_of(params[i]) != 1) throw PreconditionError("make_model: dimension must be an integer");
    return params[i].convert_to<int>();
  };
  if (name == "rpn" || name == "real_projective") return real_projective(int_param(0), params.size() > 1 ? params[1] : Rational(1));
  switch (parse_model_kind(name)) {
    case ModelKind::round_sphere:
      return round_sphere(int_param(0), params.size() > 1 ? params[1] : Rational(1));
    case ModelKind::flat_torus: {
      const int n = int_param(0);
      std::vector<Rational> q(params.begin() + 1, params.end());
      if (q.empty()) q.assign(n, Rational(1));
      return flat_torus(n, q);
    }
    case ModelKind::cp1_killing: return cp1_killing();
    case ModelKind::cpn_symbolic: return cpn_symbolic(int_param(0));
    case ModelKind::hpn_spectral: return hpn_spectral(int_param(0));
    case ModelKind::cap2_spectral: return cap2_spectral();
  }
  throw PreconditionError("unsupported model: " + name);
}

SpectrumTable closed_form_spectrum(const ModelSpace& model, int k_max) {
  if (k_max < 1) throw PreconditionError("closed_form_spectrum: k_max must be >= 1");
  if (!model.has_closed_form_spectrum())
    throw PreconditionError("closed_form_spectrum: " + model.name() +
                            " has no closed-form spectrum here; use a discrete eigensolve");
  if (model.kind == ModelKind::flat_torus) return torus_spectrum(model, k_max);
  SpectrumTable t{model, model.metric_tag, {}};
  t.rows.reserve(k_max + 1);
  for (int k = 0; k <= k_max; ++k)
    t.rows.push_back({k, formula_eigenvalue(model, k), formula_multiplicity(model, k)});
  return t;
}

bool spectrum_contains(const SpectrumTable& table, const Rational& lambda) {
  if (table.rows.empty()) throw PreconditionError("spectrum_contains: empty table");
  if (lambda < 0) return false;
  if (lambda <= table.top()) {
    return std::any_of(table.rows.begin(), table.rows.end(),
                       [&](const SpectrumRow& r) { return r.eigenvalue == lambda; });
  }
  // Work out how far the table must extend: first k with eigenvalue > lambda.
  int need = std::max<int>(static_cast<int>(table.rows.size()), 2);
  for (;; need *= 2) {
    SpectrumTable longer = closed_form_spectrum(table.model, need);
    // Tables may be rescaled copies; recover the factor through row 1.
    Rational factor = table.rows.size() > 1 ? table.rows[1].eigenvalue / longer.rows[1].eigenvalue : Rational(1);
    for (const auto& r : longer.rows) {
      if (r.eigenvalue * factor > lambda) {
        throw InsufficientSpectrumError("spectrum_contains: table stops at k=" + std::to_string(table.rows.back().k) +
                                            "; need k_max >= " + std::to_string(r.k),
                                        r.k);
      }
    }
    if (need > (1 << 20)) throw PreconditionError("spectrum_contains: lambda out of reach");
  }
}

SpectrumTable rescale(const SpectrumTable& table, const Rational& c, MetricTag new_tag) {
  if (c <= 0) throw PreconditionError("rescale: factor must be positive");
  SpectrumTable out = table;
  out.metric_tag = new_tag;
  for (auto& r : out.rows) r.eigenvalue /= c;
  return out;
}

std::string to_csv(const SpectrumTable& table) {
  std::ostringstream os;
  os << "k,eigenvalue_num,eigenvalue_den,multiplicity,metric_tag\n";
  for (const auto& r : table.rows) {
    os << r.k << ',' << numerator_of(r.eigenvalue).str() << ',' << denominator_of(r.eigenvalue).str() << ',';
    if (r.multiplicity) os << *r.multiplicity;
    os << ',' << to_string(table.metric_tag) << '\n';
  }
  return os.str();
}

}  // namespace model
}  // namespace solitonkit
