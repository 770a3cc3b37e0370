// Acceptance run: one PASS/FAIL line per criterion, measurements in acceptance_report.json.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "oracles.hpp"
#include "solitonkit/deformation.hpp"
#include "solitonkit/errors.hpp"
#include "solitonkit/model_spaces.hpp"
#include "solitonkit/random_fields.hpp"
#include "solitonkit/rep_weights.hpp"
#include "solitonkit/rigidity.hpp"
#include "solitonkit/soliton.hpp"

using namespace solitonkit;
using namespace solitonkit::grid;
using json = nlohmann::ordered_json;

namespace {

// A halving of h must shrink an O(h^2) quantity by a factor in this window.
constexpr double kRatioMin = 3.0;
constexpr double kRatioMax = 5.0;
// Observed order log(e_coarse / e_fine) / log(N_fine / N_coarse) accepted as second order.
constexpr double kMinOrder = 1.5;

struct Check {
  bool ok = true;
  std::ostringstream why;
  json data = json::object();

  void require(bool cond, const std::string& msg) {
    if (!cond) {
      ok = false;
      why << (why.tellp() > 0 ? "; " : "") << msg;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double order(double coarse, double fine, int n_coarse, int n_fine) {
  return std::log(coarse / fine) / std::log(static_cast<double>(n_fine) / n_coarse);
}

SolitonPair unit_sphere(int n) { return normalize_einstein(round_sphere_metric(ChartAtlas::sphere(n), 1.0), 1.0); }

std::string num(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

// ---------------------------------------------------------------------------

void exact_spectra(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  int rows = 0;
  for (int n : {2, 3, 4}) {
    const auto t = model::closed_form_spectrum(model::hpn_spectral(n), 20);
    for (const auto& r : t.rows) {
      c.require(r.eigenvalue == oracles::hpn_eigenvalue(n, r.k), "HP" + std::to_string(n) + " k=" + std::to_string(r.k));
      ++rows;
    }
    c.require(t.rows.size() == 21, "HP" + std::to_string(n) + " row count");
    c.require(!model::spectrum_contains(t, Rational(1)), "1 in Spec(HP" + std::to_string(n) + ")");
  }
  const auto t = model::closed_form_spectrum(model::cap2_spectral(), 20);
  for (const auto& r : t.rows) {
    c.require(r.eigenvalue == oracles::cap2_eigenvalue(r.k), "CaP2 k=" + std::to_string(r.k));
    ++rows;
  }
  c.require(!model::spectrum_contains(t, Rational(1)), "1 in Spec(CaP2)");
  const double s = seconds_since(t0);
  c.require(s < 1.0, "runtime " + num(s) + " s");
  c.data = {{"rows_checked", rows}, {"seconds", s}};
}

void representation_count(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  json per_n = json::array();
  for (int n = 2; n <= 5; ++n) {
    const auto r = rep::dim_Z_cpn(n);
    const long long su = (n + 1LL) * (n + 1) - 1;
    c.require(r.hom_multiplicity == 2, "m = " + std::to_string(r.hom_multiplicity) + " at n=" + std::to_string(n));
    c.require(r.dim_Z == su, "dim Z at n=" + std::to_string(n));
    c.require(r.dim_ker_T == 2 * su, "dim ker T at n=" + std::to_string(n));
    per_n.push_back({{"n", n}, {"m", r.hom_multiplicity}, {"dim_Z", r.dim_Z}, {"dim_ker_T", r.dim_ker_T}});
  }
  const double s = seconds_since(t0);
  c.require(s < 10.0, "runtime " + num(s) + " s");
  c.data = {{"counts", per_n}, {"seconds", s}};
}

void bianchi(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> res, rel;
  for (int n : {32, 64, 128}) {
    Rng rng(7);
    const auto at = ChartAtlas::torus(n, 2 * std::numbers::pi, 2 * std::numbers::pi);
    const auto g = random_conformal_metric(at, rng);
    const auto f = random_scalar(at, rng, 2, 0.4);
    const auto [a, b] = bianchi_terms(g, f);
    res.push_back((a - b).max_norm());
    rel.push_back(res.back() / std::max(a.max_norm(), b.max_norm()));
  }
  const double r1 = res[0] / res[1], r2 = res[1] / res[2];
  for (double r : {r1, r2}) c.require(r >= kRatioMin && r <= kRatioMax, "ratio " + num(r));
  c.require(rel[2] < 1e-2, "relative residual " + num(rel[2]));
  const double s = seconds_since(t0);
  c.require(s < 30.0, "runtime " + num(s) + " s");
  c.data = {{"residuals", res}, {"relative", rel}, {"ratios", {r1, r2}}, {"seconds", s}};
}

void linearization(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> eps{1e-3, 1e-4};
  std::vector<LinearizationCheck> runs;
  for (int n : {32, 64}) runs.push_back(check_linearization(unit_sphere(n), 10, eps, 11));
  json per_eps = json::array();
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double ratio = runs[0].combined(k) / runs[1].combined(k);
    c.require(ratio >= kRatioMin && ratio <= kRatioMax, "combined error ratio " + num(ratio) + " at eps " + num(eps[k]));
    per_eps.push_back({{"eps", eps[k]}, {"errors", {runs[0].combined(k), runs[1].combined(k)}}, {"ratio", ratio}});
  }
  // O(eps^2) is far below O(h^2) here: the two steps must agree closely.
  for (const auto& r : runs)
    c.require(std::abs(r.combined(0) - r.combined(1)) <= 1e-3 * r.combined(1), "eps dependence");
  const double gap_ratio = runs[0].unsimplified_gap / runs[1].unsimplified_gap;
  c.require(gap_ratio >= kRatioMin, "closed-form gap ratio " + num(gap_ratio));
  for (const auto& r : runs) c.require(r.matrix_gap < 1e-10, "assembled matrix mismatch");
  const double s = seconds_since(t0);
  c.require(s < 120.0, "runtime " + num(s) + " s");
  c.data = {{"combined", per_eps},
            {"unsimplified_gap", {runs[0].unsimplified_gap, runs[1].unsimplified_gap}},
            {"unsimplified_gap_ratio", gap_ratio},
            {"matrix_gap", {runs[0].matrix_gap, runs[1].matrix_gap}},
            {"seconds", s}};
}

void entropy(Check& c) {
  const auto p = unit_sphere(128);
  const auto r = residual_S(p);
  const double tol = soliton_tolerance(p);
  const double w_err = r.w - (std::log(2.0) - 1.0);
  c.require(std::max(r.s1.max_norm(), r.s2.max_norm()) <= tol, "residual above soliton tolerance");
  c.require(std::abs(w_err) < 1e-3, "W - (log 2 - 1) = " + num(w_err));
  Rng rng(13);
  double dw = 0.0;
  for (int k = 0; k < 3; ++k) {
    DeformationPair d{random_sym2(p.g.atlas(), rng, 2, 0.5), random_scalar(p.g.atlas(), rng, 2, 0.5)};
    dw = std::max(dw, std::abs(fd_entropy_derivative(p, make_tangent(p, d), 1e-4)));
  }
  c.require(dw < 1e-3, "directional dW = " + num(dw));
  c.data = {{"resolution", 128},
            {"s1_max", r.s1.max_norm()},
            {"s2_max", r.s2.max_norm()},
            {"soliton_tolerance", tol},
            {"W", r.w},
            {"W_error", w_err},
            {"max_directional_dW", dw}};
}

void cp_family_check(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<CpFamily> fam;
  for (int n : {64, 128}) fam.push_back(cp_family(n));
  json runs = json::array();
  for (const auto& f : fam) {
    c.require(f.basis.dimension() == 3, "dim F = " + std::to_string(f.basis.dimension()));
    c.require(!f.basis.undecided && f.basis.certificate >= 1e3, "gap certificate " + num(f.basis.certificate));
    runs.push_back({{"resolution", f.resolution}, {"dimension", f.basis.dimension()}, {"certificate", f.basis.certificate}});
  }
  json orders = json::array();
  if (fam[0].checks.size() == fam[1].checks.size()) {
    for (std::size_t i = 0; i < fam[0].checks.size(); ++i) {
      const auto& a = fam[0].checks[i];
      const auto& b = fam[1].checks[i];
      const double o1 = order(a.delta_h, b.delta_h, 64, 128);
      const double o2 = order(a.lich, b.lich, 64, 128);
      const double o3 = order(a.hess_divergence, b.hess_divergence, 64, 128);
      for (double o : {o1, o2, o3}) c.require(o >= kMinOrder, "element " + std::to_string(i) + " order " + num(o));
      orders.push_back({{"delta_h", {a.delta_h, b.delta_h}},
                        {"lichnerowicz", {a.lich, b.lich}},
                        {"hess_divergence", {a.hess_divergence, b.hess_divergence}},
                        {"orders", {o1, o2, o3}}});
    }
  } else {
    c.require(false, "element count differs between resolutions");
  }
  const double s = seconds_since(t0);
  c.require(s < 120.0, "runtime " + num(s) + " s");
  c.data = {{"runs", runs}, {"elements", orders}, {"seconds", s}};
}

void einstein_deformations(Check& c) {
  const auto e = compute_E(unit_sphere(24));
  c.require(!e.undecided, "undecided: " + e.note);
  c.require(e.dimension() == 0, "dim E = " + std::to_string(e.dimension()));
  c.require(e.certificate >= 1e3, "certificate " + num(e.certificate));
  c.data = {{"resolution", 24}, {"dimension", e.dimension()}, {"certificate", e.certificate}};
}

void criteria_arithmetic(Check& c) {
  int cases = 0, certify = 0;
  for (const auto& t : oracles::kPinchTable) {
    const auto r = rigidity::pinching_test(t.n, make_rational(t.kmin_num, t.kmin_den), make_rational(t.kmax_num, t.kmax_den));
    c.require((r.outcome == rigidity::Outcome::certifies) == t.certifies, "pinching case " + std::to_string(cases));
    ++cases;
    certify += t.certifies;
  }
  c.require(certify > 0 && certify < cases, "table must span both branches");
  const auto unit = model::round_sphere(2, Rational(1));
  const auto d = rigidity::diameter_functional(unit);
  c.require(std::abs(d.value - std::numbers::pi) < 1e-12, "D(unit S2) = " + num(d.value));
  c.require(rigidity::diameter_test(unit).outcome == rigidity::Outcome::fails_to_certify, "diameter test certified");
  const int n = 24;
  const auto at = ChartAtlas::sphere(n);
  const double h = at->spacing(0);
  const double d1 = rigidity::diameter_functional(round_sphere_metric(at, 1.0)).value;
  const double d4 = rigidity::diameter_functional(round_sphere_metric(at, 4.0)).value;
  c.require(std::abs(d1 - d4) <= h, "scale dependence " + num(std::abs(d1 - d4)));
  c.require(std::abs(d1 - std::numbers::pi) <= h, "grid D error " + num(std::abs(d1 - std::numbers::pi)));
  c.data = {{"pinching_cases", cases},
            {"pinching_certified", certify},
            {"D_closed_form", d.value},
            {"threshold", rigidity::diameter_threshold()},
            {"grid_resolution", n},
            {"grid_spacing", h},
            {"grid_D", {d1, d4}}};
}

void decomposition(Check& c) {
  json bases = json::array();
  for (const bool sphere : {false, true}) {
    std::vector<double> worst_orth;
    json runs = json::array();
    for (int n : {16, 24}) {
      Rng rng(5);
      SolitonPair p = sphere ? unit_sphere(n) : [&] {
        const auto at = ChartAtlas::torus(n, 2 * std::numbers::pi, 2 * std::numbers::pi);
        auto g = random_conformal_metric(at, rng);
        auto f = random_scalar(at, rng, 2, 0.4);
        return SolitonPair{std::move(g), std::move(f), 2};
      }();
      const SliceProjector proj(p.g, p.f);
      double div = 0, idem = 0, orth = 0;
      for (int k = 0; k < 10; ++k) {
        const auto h = random_sym2(p.g.atlas(), rng, 3, 1.0);
        const auto s = proj.project(h);
        div = std::max(div, s.divergence);
        idem = std::max(idem, proj.project(s.h1).X.max_norm() / h.max_norm());
        orth = std::max(orth, s.orthogonality);
      }
      if (n == 24) {
        c.require(div < 1e-6, "divergence " + num(div));
        c.require(idem < 1e-6, "idempotence " + num(idem));
      }
      worst_orth.push_back(orth);
      runs.push_back({{"resolution", n}, {"divergence", div}, {"idempotence", idem}, {"orthogonality", orth},
                      {"deflated", proj.deflated()}});
    }
    const double o = order(worst_orth[0], worst_orth[1], 16, 24);
    c.require(o >= kMinOrder, std::string(sphere ? "sphere" : "torus") + " orthogonality order " + num(o));
    bases.push_back({{"base", sphere ? "unit S2" : "random torus"}, {"runs", runs}, {"orthogonality_order", o}});
  }
  c.data = {{"bases", bases}};
}

void calibration(Check& c) {
  const auto a = calibrate_beta(32, 10, 17);
  const auto b = calibrate_beta(64, 10, 17);
  const double ratio = a.residual_one / b.residual_one;
  c.require(a.calibrated_constant == 1.0 && b.calibrated_constant == 1.0, "calibrated constant is not 1");
  c.require(std::abs(b.fitted_constant - 1.0) < 1e-2, "fitted constant " + num(b.fitted_constant));
  c.require(ratio >= kRatioMin, "residual ratio " + num(ratio));
  c.require(b.residual_half > 0.1, "c = 1/2 residual " + num(b.residual_half) + " unexpectedly small");
  c.data = {{"samples", 10},
            {"fitted_constant", {a.fitted_constant, b.fitted_constant}},
            {"fitted_spread", {a.fitted_spread, b.fitted_spread}},
            {"residual_c_one", {a.residual_one, b.residual_one}},
            {"residual_c_half", {a.residual_half, b.residual_half}},
            {"residual_ratio", ratio},
            {"finding",
             "delta_f of the first component equals c d of the second with c = 1, not 1/2; "
             "the c = 1 residual decays at second order while the c = 1/2 residual stays O(1)"}};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string report_path = argc > 1 ? argv[1] : "acceptance_report.json";
  const std::pair<const char*, std::function<void(Check&)>> criteria[] = {
      {"exact spectra of HPn and CaP2", exact_spectra},
      {"representation count m = 2", representation_count},
      {"twisted Bianchi identity convergence", bianchi},
      {"linearization against finite differences", linearization},
      {"entropy criticality at the unit sphere", entropy},
      {"CP1 deformation family", cp_family_check},
      {"Einstein deformations of the unit sphere", einstein_deformations},
      {"pinching and diameter arithmetic", criteria_arithmetic},
      {"twisted slice decomposition", decomposition},
      {"beta calibration", calibration},
  };
  json report = json::array();
  int failed = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    const double s = seconds_since(t0);
    std::cout << (c.ok ? "PASS" : "FAIL") << "  " << index << ". " << name << "  (" << num(s) << " s)";
    if (!c.ok) std::cout << "  " << c.why.str();
    std::cout << std::endl;
    failed += !c.ok;
    report.push_back({{"criterion", index}, {"name", name}, {"pass", c.ok}, {"reason", c.why.str()}, {"measurements", c.data}});
  }
  std::ofstream(report_path) << report.dump(2) << "\n";
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << (10 - failed) << "/10" << std::endl;
  return failed ? 1 : 0;
}
