#include "solitonkit/rigidity.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <sstream>

#include "solitonkit/errors.hpp"
#include "solitonkit/operators.hpp"
#include "solitonkit/rep_weights.hpp"

namespace solitonkit::rigidity {

using model::ModelKind;
using model::ModelSpace;
using solitonkit::to_string;

namespace {

constexpr int kInitialKmax = 8;

std::string fmt(double v, int digits = 10) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

// Membership with the table grown until it reaches lambda.
bool contains_exact(const model::SpectrumTable& base, const Rational& scale, model::MetricTag tag,
                    const Rational& lambda, const ModelSpace& m, model::SpectrumTable* used) {
  int kmax = std::max<int>(kInitialKmax, static_cast<int>(base.rows.size()) - 1);
  for (;;) {
    auto table = model::rescale(model::closed_form_spectrum(m, kmax), scale, tag);
    try {
      const bool in = model::spectrum_contains(table, lambda);
      if (used) *used = std::move(table);
      return in;
    } catch (const InsufficientSpectrumError& e) {
      kmax = std::max(kmax + 1, e.required_kmax());
    }
  }
}

std::string bracket(const model::SpectrumTable& t, const Rational& lambda) {
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].eigenvalue == lambda) return "lambda_" + std::to_string(t.rows[i].k) + " = " + to_string(lambda);
    if (t.rows[i].eigenvalue > lambda && i > 0)
      return "lambda_" + std::to_string(t.rows[i - 1].k) + " = " + to_string(t.rows[i - 1].eigenvalue) + " < " +
             to_string(lambda) + " < lambda_" + std::to_string(t.rows[i].k) + " = " + to_string(t.rows[i].eigenvalue);
  }
  return "table top " + to_string(t.top());
}

DiameterValue sphere_diameter(const ModelSpace& m) {
  const int n = m.param_n;
  DiameterValue d;
  d.dimension = n;
  d.diameter = *m.diameter;
  d.mean_scalar = static_cast<double>(n) * (n - 1) / to_double(m.radius_sq);
  d.value = d.diameter * std::sqrt(d.mean_scalar / n);
  d.method = "closed form";
  return d;
}

CriterionResult external_two_positive() {
  CriterionResult r;
  r.name = "external: 2-positive curvature";
  r.outcome = Outcome::certifies;
  r.external = true;
  r.evidence.push_back("assumption: shrinking Ricci solitons with 2-positive curvature are round (cited, not computed)");
  return r;
}

CriterionResult external_e_zero(const ModelSpace& m) {
  CriterionResult r;
  r.name = "external: E = 0";
  r.outcome = Outcome::certifies;
  r.external = true;
  r.evidence.push_back("assumption: " + m.name() +
                       " has no infinitesimal Einstein deformations (cited, not computed)");
  return r;
}

}  // namespace

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::certifies: return "certifies";
    case Outcome::fails_to_certify: return "fails_to_certify";
    case Outcome::inapplicable: return "inapplicable";
  }
  return "?";
}

std::string to_string(Overall o) {
  switch (o) {
    case Overall::sol_rigid_certified: return "sol_rigid_certified";
    case Overall::weakly_rigid_certified: return "weakly_rigid_certified";
    case Overall::undecided: return "undecided";
  }
  return "?";
}

CriterionResult spectral_Z_equals_E(const ModelSpace& m) {
  CriterionResult r;
  r.name = "spectral: Z = E";
  r.inputs.emplace_back("model", m.name());
  if (!m.has_closed_form_spectrum()) {
    r.evidence.push_back("no closed-form spectrum");
    return r;
  }
  if (!m.einstein_constant || *m.einstein_constant <= 0) {
    r.evidence.push_back("not Einstein with positive constant");
    return r;
  }
  const Rational c = *m.einstein_constant;
  r.inputs.emplace_back("einstein_constant", to_string(c));
  model::SpectrumTable normalized, own;
  const auto base = model::closed_form_spectrum(m, kInitialKmax);
  const bool in_normalized = contains_exact(base, c, model::MetricTag::normalized, Rational(2), m, &normalized);
  const bool in_own = contains_exact(base, Rational(1), m.metric_tag, 2 * c, m, &own);
  if (in_normalized != in_own)
    throw IntegrityError("spectral_Z_equals_E: normalized and model-normalization tests disagree for " + m.name());
  r.evidence.push_back("normalized (Ric = g): " + bracket(normalized, Rational(2)));
  r.evidence.push_back("model normalization (Ric = " + to_string(c) + " g): " + to_string(2 * c) +
                       (in_own ? " in spectrum: " : " not in spectrum: ") + bracket(own, 2 * c));
  r.outcome = in_normalized ? Outcome::fails_to_certify : Outcome::certifies;
  return r;
}

CriterionResult pinching_test(int n, const Rational& k_min, const Rational& k_max) {
  if (n < 2) throw PreconditionError("pinching_test: n must be >= 2");
  CriterionResult r;
  r.name = "pinching";
  r.inputs = {{"n", std::to_string(n)}, {"K_min", to_string(k_min)}, {"K_max", to_string(k_max)}};
  if (k_min <= 0 || k_max <= 0) {
    r.evidence.push_back("nonpositive sectional curvature bound");
    return r;
  }
  if (k_min > k_max) throw PreconditionError("pinching_test: K_min exceeds K_max");
  const Rational delta = k_min / k_max;
  const Rational floor_k = Rational(1) / n;
  const Rational floor_delta = Rational(n - 2) / (3 * n);
  const bool ok_k = k_min >= floor_k;
  const bool ok_delta = delta > floor_delta;
  r.evidence.push_back("K_min = " + to_string(k_min) + (ok_k ? " >= " : " < ") + "1/n = " + to_string(floor_k));
  r.evidence.push_back("delta = " + to_string(delta) + (ok_delta ? " > " : " <= ") + "(n-2)/(3n) = " +
                       to_string(floor_delta));
  r.outcome = ok_k && ok_delta ? Outcome::certifies : Outcome::fails_to_certify;
  return r;
}

double diameter_threshold() { return 2.0 * (std::numbers::sqrt2 - 1.0) * std::numbers::pi; }

DiameterValue diameter_functional(const ModelSpace& m) {
  if (m.kind == ModelKind::round_sphere || m.kind == ModelKind::cp1_killing) {
    if (m.param_n < 2 && m.kind == ModelKind::round_sphere)
      throw PreconditionError("diameter_functional: mean scalar curvature of S^1 is zero");
    ModelSpace s = m;
    if (m.kind == ModelKind::cp1_killing) s = model::round_sphere(2, m.radius_sq);
    return sphere_diameter(s);
  }
  if (m.kind == ModelKind::flat_torus)
    throw PreconditionError("diameter_functional: mean scalar curvature of a flat torus is zero");
  throw PreconditionError("diameter_functional: no diameter available for " + m.name());
}

DiameterValue diameter_functional(const grid::MetricField& g) {
  const auto atlas = g.atlas();
  const auto& a = *atlas;
  const auto geo = grid::make_geometry(g);
  const double vol = grid::integrate(*geo, grid::constant_scalar(atlas, 1.0), false);
  const double mean_s = grid::integrate(*geo, geo->curvature().scalar, false) / vol;

  std::vector<std::pair<int, int>> offsets;
  for (int di = -kGraphRadius; di <= kGraphRadius; ++di)
    for (int dj = -kGraphRadius; dj <= kGraphRadius; ++dj)
      if ((di || dj) && std::gcd(std::abs(di), std::abs(dj)) == 1) offsets.emplace_back(di, dj);

  const auto& native = a.native_nodes();
  std::vector<int> vid(a.node_count(), -1);
  for (std::size_t k = 0; k < native.size(); ++k) vid[native[k]] = static_cast<int>(k);
  std::vector<std::vector<std::pair<int, double>>> adj(native.size());
  const auto quad = [&](int node, double dx, double dy) {
    return std::sqrt(g(node, 0, 0) * dx * dx + 2.0 * g(node, 0, 1) * dx * dy + g(node, 1, 1) * dy * dy);
  };
  const double hx = a.spacing(0), hy = a.spacing(1);
  for (int u : native)
    for (const auto& [di, dj] : offsets) {
      const int v = a.shift(u, di, dj);
      if (v < 0 || vid[v] < 0) continue;
      const double len = 0.5 * (quad(u, di * hx, dj * hy) + quad(v, di * hx, dj * hy));
      adj[vid[u]].emplace_back(vid[v], len);
    }
  if (a.kind() == grid::AtlasKind::sphere) {
    // Join each overlap node to the corners of the cell containing its image in the other chart.
    for (int u : native) {
      const auto w = a.coordinate(u);
      const double r2 = w[0] * w[0] + w[1] * w[1];
      if (r2 < 0.64) continue;
      const int other = 1 - a.chart_of(u);
      const grid::Vec2 wp{w[0] / r2, w[1] / r2};
      const auto& ch = a.chart(other);
      const int i0 = static_cast<int>(std::floor((wp[0] - ch.lo[0]) / hx));
      const int j0 = static_cast<int>(std::floor((wp[1] - ch.lo[1]) / hy));
      for (int di = 0; di <= 1; ++di)
        for (int dj = 0; dj <= 1; ++dj) {
          const int i = i0 + di, j = j0 + dj;
          if (i < 0 || j < 0 || i >= a.resolution() || j >= a.resolution()) continue;
          const int v = a.node(other, i, j);
          if (vid[v] < 0) continue;
          const auto wv = a.coordinate(v);
          const double len = quad(v, wp[0] - wv[0], wp[1] - wv[1]);
          adj[vid[u]].emplace_back(vid[v], len);
          adj[vid[v]].emplace_back(vid[u], len);
        }
    }
  }

  std::vector<int> targets;
  for (int nd : a.owned_nodes()) targets.push_back(vid[nd]);
  double diam = 0.0;
  std::vector<double> dist(native.size());
  using Item = std::pair<double, int>;
  for (int s : targets) {
    if (s < 0) throw IntegrityError("diameter_functional: owned node outside the native set");
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0.0;
    pq.emplace(0.0, s);
    while (!pq.empty()) {
      const auto [d, x] = pq.top();
      pq.pop();
      if (d > dist[x]) continue;
      for (const auto& [y, len] : adj[x])
        if (d + len < dist[y]) {
          dist[y] = d + len;
          pq.emplace(dist[y], y);
        }
    }
    for (int t : targets) {
      if (!std::isfinite(dist[t])) throw IntegrityError("diameter_functional: grid graph is disconnected");
      diam = std::max(diam, dist[t]);
    }
  }

  DiameterValue out;
  out.dimension = 2;
  out.diameter = diam;
  out.mean_scalar = mean_s;
  if (mean_s > 0.0) out.value = diam * std::sqrt(mean_s / 2.0);
  out.method = "grid graph";
  return out;
}

namespace {

CriterionResult diameter_result(const DiameterValue& d, std::vector<std::pair<std::string, std::string>> inputs) {
  CriterionResult r;
  r.name = "diameter";
  r.inputs = std::move(inputs);
  r.evidence.push_back("method: " + d.method + (d.method == "grid graph" ? " (O(h) accurate)" : ""));
  r.evidence.push_back("diameter = " + fmt(d.diameter) + ", mean scalar curvature = " + fmt(d.mean_scalar));
  if (d.mean_scalar <= 0.0) {
    r.evidence.push_back("nonpositive mean scalar curvature");
    return r;
  }
  const double thr = diameter_threshold();
  r.evidence.push_back("D = " + fmt(d.value) + (d.value < thr ? " < " : " >= ") + "2(sqrt 2 - 1) pi = " + fmt(thr));
  r.outcome = d.value < thr ? Outcome::certifies : Outcome::fails_to_certify;
  return r;
}

}  // namespace

CriterionResult diameter_test(const ModelSpace& m) {
  try {
    return diameter_result(diameter_functional(m), {{"model", m.name()}});
  } catch (const PreconditionError& e) {
    CriterionResult r;
    r.name = "diameter";
    r.inputs = {{"model", m.name()}};
    r.evidence.push_back(e.what());
    return r;
  }
}

CriterionResult diameter_test(const grid::MetricField& g) {
  return diameter_result(diameter_functional(g), {{"grid", g.atlas()->descriptor()}});
}

RigidityVerdict rank_one_verdict(const ModelSpace& input) {
  RigidityVerdict v;
  v.model = input;
  ModelSpace m = input;
  if (m.kind == ModelKind::cp1_killing) m = model::round_sphere(2, m.radius_sq);

  bool sol_rigid = false, weak = false;
  switch (m.kind) {
    case ModelKind::round_sphere: {
      const int n = m.param_n;
      if (n < 2) throw PreconditionError("rank_one_verdict: S^1 is not a shrinking soliton");
      v.criteria.push_back(spectral_Z_equals_E(m));
      // Sectional curvature 1 / r^2 becomes 1 / (n - 1) after scaling to Ric = g.
      auto pinch = pinching_test(n, make_rational(1, n - 1), make_rational(1, n - 1));
      pinch.inputs.emplace_back("model", m.name());
      v.criteria.push_back(pinch);
      v.criteria.push_back(diameter_test(m));
      v.criteria.push_back(external_two_positive());
      sol_rigid = pinch.outcome == Outcome::certifies || v.criteria.back().outcome == Outcome::certifies;
      weak = v.criteria[2].outcome == Outcome::certifies;
      break;
    }
    case ModelKind::hpn_spectral:
    case ModelKind::cap2_spectral: {
      v.criteria.push_back(spectral_Z_equals_E(m));
      CriterionResult pinch;
      pinch.name = "pinching";
      pinch.inputs = {{"model", m.name()}};
      pinch.evidence.push_back("sectional curvature bounds not populated for this model");
      v.criteria.push_back(pinch);
      v.criteria.push_back(diameter_test(m));
      v.criteria.push_back(external_e_zero(m));
      sol_rigid = v.criteria[0].outcome == Outcome::certifies;
      if (sol_rigid) v.criteria[0].evidence.push_back("Z = E and E = 0 (external): essential deformations are trivial");
      break;
    }
    case ModelKind::cpn_symbolic: {
      v.criteria.push_back(spectral_Z_equals_E(m));
      const auto count = rep::dim_Z_cpn(m.param_n);
      CriterionResult z;
      z.name = "deformation count";
      z.inputs = {{"model", m.name()}};
      z.outcome = Outcome::fails_to_certify;
      z.evidence.push_back("dim Z = (n+1)^2 - 1 = " + std::to_string(count.dim_Z));
      z.evidence.push_back("dim ker T = " + std::to_string(count.dim_ker_T) + " = dim Im psi_1 + dim Im psi_2");
      if (count.hom_multiplicity > 0)
        z.evidence.push_back("computed dim Hom_K(g, S^2 m*) = " + std::to_string(count.hom_multiplicity));
      z.evidence.push_back("E = 0 is an external input; Z is nonzero, so Z != E");
      v.criteria.push_back(z);
      v.criteria.push_back(diameter_test(m));
      break;
    }
    default:
      throw PreconditionError("rank_one_verdict: unsupported model " + m.name());
  }
  v.overall = sol_rigid ? Overall::sol_rigid_certified : weak ? Overall::weakly_rigid_certified : Overall::undecided;
  return v;
}

}  // namespace solitonkit::rigidity
