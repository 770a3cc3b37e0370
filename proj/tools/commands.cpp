#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cli_support.hpp"
#include "solitonkit/deformation.hpp"
#include "solitonkit/errors.hpp"
#include "solitonkit/model_spaces.hpp"
#include "solitonkit/op_cache.hpp"
#include "solitonkit/random_fields.hpp"
#include "solitonkit/rep_weights.hpp"
#include "solitonkit/rigidity.hpp"
#include "solitonkit/soliton.hpp"

namespace solitonkit::cli {

namespace {

using grid::ChartAtlas;

constexpr double kBianchiRatioMin = 3.0;
constexpr double kBianchiRatioMax = 5.0;

std::vector<int> default_resolutions(const std::string& command) {
  if (command == "bianchi-check") return {32, 64, 128};
  if (command == "linearize-check") return {32, 64};
  if (command == "residual") return {32, 64};
  if (command == "kernel-Z" || command == "kernel-E") return {24, 32};
  if (command == "slice-project") return {16, 24};
  if (command == "cp-family") return {64};
  return {};
}

std::vector<int> resolutions_of(const Config& cfg) {
  return cfg.resolutions.empty() ? default_resolutions(cfg.command) : cfg.resolutions;
}

std::string model_of(const Config& cfg, const std::string& fallback) {
  return cfg.models.empty() ? fallback : cfg.models.front();
}

// Grid models: "s2" is the unit round sphere as a soliton with Ric + hess f = g;
// "torus2" is a seeded random conformal metric on the square torus with a random potential.
SolitonPair grid_pair(const std::string& name, int resolution, std::uint64_t seed, bool need_soliton) {
  if (name == "s2" || name == "sphere") {
    auto at = ChartAtlas::sphere(resolution);
    return normalize_einstein(grid::round_sphere_metric(at, 1.0), 1.0);
  }
  if (name == "torus2" || name == "torus") {
    if (need_soliton) throw PreconditionError("model torus2 is not a shrinking soliton; use s2");
    grid::Rng rng(seed);
    auto at = ChartAtlas::torus(resolution, 2 * M_PI, 2 * M_PI);
    auto g = grid::random_conformal_metric(at, rng);
    auto f = grid::random_scalar(at, rng, 2, 0.4);
    return SolitonPair{std::move(g), std::move(f), 2};
  }
  throw PreconditionError("unsupported grid model: " + name + " (expected s2 or torus2)");
}

json ratios(const std::vector<double>& v) {
  json r = json::array();
  for (std::size_t i = 1; i < v.size(); ++i) r.push_back(v[i] > 0 ? v[i - 1] / v[i] : INFINITY);
  return r;
}

std::string fmt(double x, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

std::vector<Rational> model_params(const Config& cfg) {
  return {make_rational(cfg.n), parse_rational(cfg.radius_sq)};
}

json operator_provenance(grid::OperatorCache& cache, const std::string& name, const SolitonPair& p,
                         const std::function<SparseMatrix()>& build) {
  const std::string key = grid::operator_key(name, p.g, p.f);
  const SparseMatrix m = cache.get_or_build(key, build);
  grid::ContentHash h;
  h.add(m.valuePtr(), sizeof(double) * m.nonZeros());
  h.add(m.innerIndexPtr(), sizeof(int) * m.nonZeros());
  return {{"operator", name}, {"resolution", p.g.atlas()->resolution()}, {"key", key}, {"content_hash", h.hex()}};
}

// ---------------------------------------------------------------------------

Outcome cmd_model_list(const Config&) {
  Outcome o;
  struct Entry {
    const char* name;
    const char* params;
    const char* spectrum;
  };
  const Entry entries[] = {
      {"sphere", "--n, --radius-sq", "closed form"},       {"rpn", "--n, --radius-sq", "closed form"},
      {"torus", "--n", "closed form"},                     {"cp1", "", "closed form (Killing metric)"},
      {"cpn", "--n", "closed form"},                       {"hpn", "--n", "closed form"},
      {"cap2", "", "closed form"},                         {"s2", "--resolutions", "grid model (soliton)"},
      {"torus2", "--resolutions, --seed", "grid model (random conformal, not a soliton)"},
  };
  o.results = json::array();
  for (const auto& e : entries) {
    o.results.push_back({{"name", e.name}, {"parameters", e.params}, {"spectrum", e.spectrum}});
    o.summary.push_back(std::string(e.name) + "  [" + e.params + "]  " + e.spectrum);
  }
  return o;
}

Outcome cmd_spectrum(const Config& cfg) {
  Outcome o;
  const auto m = model::make_model(model_of(cfg, "sphere"), model_params(cfg));
  const auto table = model::closed_form_spectrum(m, cfg.kmax);
  json rows = json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"k", r.k}, {"eigenvalue", to_string(r.eigenvalue)}, {"eigenvalue_approx", r.eigenvalue.convert_to<double>()},
                    {"multiplicity", r.multiplicity ? json(*r.multiplicity) : json(nullptr)}});
  o.results = {{"model", m.name()}, {"metric_tag", model::to_string(table.metric_tag)}, {"k_max", cfg.kmax}, {"rows", rows}};
  o.summary.push_back(m.name() + " (" + model::to_string(table.metric_tag) + "), k <= " + std::to_string(cfg.kmax) + ", " +
                      std::to_string(rows.size()) + " rows");
  if (m.einstein_constant && *m.einstein_constant > 0) {
    const Rational two_c = 2 * *m.einstein_constant;
    const bool in = model::spectrum_contains(table, two_c);
    o.results["membership"] = {{"lambda", to_string(two_c)}, {"in_spectrum", in}, {"exact", true},
                               {"metric_tag", model::to_string(table.metric_tag)}};
    o.summary.push_back(to_string(two_c) + " ∉ spectrum: " + (in ? "false" : "true"));
  }
  if (!cfg.csv.empty()) {
    std::ofstream f(cfg.csv);
    if (!f) throw PreconditionError("cannot write " + cfg.csv);
    f << model::to_csv(table);
    o.results["csv"] = cfg.csv;
  }
  return o;
}

Outcome cmd_residual(const Config& cfg) {
  Outcome o;
  const auto name = model_of(cfg, "s2");
  const auto res = resolutions_of(cfg);
  auto runs = run_jobs(static_cast<int>(res.size()), cfg.workers, [&](int i) -> json {
    const auto p = grid_pair(name, res[i], cfg.seed, true);
    const auto r = residual_S(p);
    const double tol = cfg.soliton_tolerance > 0 ? cfg.soliton_tolerance : soliton_tolerance(p);
    return {{"resolution", res[i]},
            {"s1_max", r.s1.max_norm()},
            {"s2_max", r.s2.max_norm()},
            {"W", r.w},
            {"W_minus_log2_minus_1", r.w - (std::log(2.0) - 1.0)},
            {"constraint", constraint_value(p)},
            {"quadrature_tolerance", cfg.quadrature_tolerance},
            {"soliton_tolerance", tol},
            {"is_soliton", std::max(r.s1.max_norm(), r.s2.max_norm()) <= tol}};
  });
  o.results = {{"model", name}, {"runs", runs}};
  for (const auto& r : runs)
    o.summary.push_back("N=" + std::to_string(r["resolution"].get<int>()) + "  |S1| " + fmt(r["s1_max"]) + "  |S2| " +
                        fmt(r["s2_max"]) + "  W " + fmt(r["W"], 10));
  return o;
}

Outcome cmd_linearize_check(const Config& cfg) {
  Outcome o;
  const auto name = model_of(cfg, "s2");
  const auto res = resolutions_of(cfg);
  grid::OperatorCache cache(cfg.cache_dir);
  json ops = json::array();
  std::vector<json> runs(res.size());
  // The cache is not thread-safe; resolutions run sequentially, directions are the inner loop.
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto p = grid_pair(name, res[i], cfg.seed, true);
    const auto c = check_linearization(p, cfg.directions, cfg.eps, cfg.seed);
    ops.push_back(operator_provenance(cache, "linearized_S", p, [&] { return LinearizedS(p).matrix(); }));
    json samples = json::array();
    for (std::size_t k = 0; k < c.samples.size(); ++k)
      samples.push_back({{"eps", c.samples[k].eps},
                         {"s1_error", c.samples[k].s1_error},
                         {"s2_error", c.samples[k].s2_error},
                         {"combined_error", c.combined(k)},
                         {"entropy_slope", c.samples[k].entropy_slope}});
    runs[i] = {{"resolution", res[i]},
               {"directions", c.directions},
               {"samples", samples},
               {"unsimplified_gap", c.unsimplified_gap},
               {"matrix_gap", c.matrix_gap}};
  }
  json conv = json::array();
  for (std::size_t k = 0; k < cfg.eps.size(); ++k) {
    std::vector<double> e;
    for (const auto& r : runs) e.push_back(r["samples"][k]["combined_error"]);
    conv.push_back({{"eps", cfg.eps[k]}, {"ratios", ratios(e)}});
  }
  std::vector<double> gaps;
  for (const auto& r : runs) gaps.push_back(r["unsimplified_gap"]);
  o.results = {{"model", name}, {"runs", runs}, {"combined_error_ratios", conv}, {"unsimplified_gap_ratios", ratios(gaps)}};
  o.provenance = {{"cache_dir", cache.directory()}, {"operators", ops}, {"cache_hits", cache.hits()}, {"cache_misses", cache.misses()}};
  for (const auto& r : runs) {
    std::string line = "N=" + std::to_string(r["resolution"].get<int>());
    for (const auto& s : r["samples"]) line += "  eps " + fmt(s["eps"], 2) + ": " + fmt(s["combined_error"]);
    line += "  unsimplified " + fmt(r["unsimplified_gap"]);
    o.summary.push_back(line);
  }
  return o;
}

Outcome cmd_bianchi_check(const Config& cfg) {
  Outcome o;
  const auto name = model_of(cfg, "torus2");
  const auto res = resolutions_of(cfg);
  auto runs = run_jobs(static_cast<int>(res.size()), cfg.workers, [&](int i) -> json {
    const auto p = grid_pair(name, res[i], cfg.seed, false);
    const auto [a, b] = bianchi_terms(p.g, p.f);
    const double r = (a - b).max_norm();
    const double scale = std::max(a.max_norm(), b.max_norm());
    return {{"resolution", res[i]}, {"residual", r}, {"scale", scale}, {"relative", r / scale}};
  });
  std::vector<double> r;
  for (const auto& x : runs) r.push_back(x["residual"]);
  const json rat = ratios(r);
  bool second_order = true;
  for (const auto& q : rat) second_order = second_order && q >= kBianchiRatioMin && q <= kBianchiRatioMax;
  o.results = {{"model", name},
               {"runs", runs},
               {"ratios", rat},
               {"ratio_window", {kBianchiRatioMin, kBianchiRatioMax}},
               {"second_order", second_order}};
  for (const auto& x : runs)
    o.summary.push_back("N=" + std::to_string(x["resolution"].get<int>()) + "  residual " + fmt(x["residual"]) + "  relative " +
                        fmt(x["relative"]));
  std::string line = "ratios:";
  for (const auto& q : rat) line += " " + fmt(q, 4);
  o.summary.push_back(line);
  return o;
}

Outcome cmd_kernel(const Config& cfg, bool z) {
  Outcome o;
  const auto name = model_of(cfg, "s2");
  const auto res = resolutions_of(cfg);
  KernelOptions opt;
  opt.gap_ratio = cfg.gap_ratio;
  const auto solve = [&](const SolitonPair& p) { return z ? compute_Z(p, opt) : compute_E(p, opt); };
  const auto rk = refine_kernel([&](int n) { return grid_pair(name, n, cfg.seed, true); }, res, solve);
  json runs = json::array();
  for (std::size_t i = 0; i < rk.runs.size(); ++i) {
    const auto& b = rk.runs[i];
    json head = json::array();
    for (std::size_t k = 0; k < std::min<std::size_t>(b.spectrum.size(), 8); ++k) head.push_back(b.spectrum[k]);
    runs.push_back({{"resolution", rk.resolutions[i]},
                    {"dimension", rk.dimensions[i]},
                    {"certificate", b.certificate},
                    {"gap_ratio", cfg.gap_ratio},
                    {"sigma_kept_max", b.sigma_kept_max},
                    {"sigma_rejected_min", b.sigma_rejected_min},
                    {"spectrum_head", head},
                    {"undecided", b.undecided},
                    {"note", b.note}});
  }
  const auto& fin = rk.finest();
  o.results = {{"space", z ? "Z" : "E"},
               {"model", name},
               {"runs", runs},
               {"stable", rk.stable},
               {"dimension", fin.undecided ? json(nullptr) : json(fin.dimension())}};
  for (const auto& r : runs)
    o.summary.push_back(std::string(z ? "Z" : "E") + " N=" + std::to_string(r["resolution"].get<int>()) + "  dim " +
                        std::to_string(r["dimension"].get<int>()) + "  certificate " + fmt(r["certificate"]));
  if (fin.undecided) {
    o.exit_code = kUndecided;
    o.summary.push_back("undecided: " + fin.note);
  }
  return o;
}

Outcome cmd_slice_project(const Config& cfg) {
  Outcome o;
  const auto name = model_of(cfg, "s2");
  const auto res = resolutions_of(cfg);
  json runs = json::array();
  std::vector<double> orth;
  for (int n : res) {
    const auto p = grid_pair(name, n, cfg.seed, false);
    const SliceProjector proj(p.g, p.f);
    grid::Rng rng(cfg.seed);
    std::vector<Sym2Field> hs;
    for (int k = 0; k < cfg.samples; ++k) hs.push_back(grid::random_sym2(p.g.atlas(), rng, cfg.bandlimit, 1.0));
    auto samples = run_jobs(cfg.samples, cfg.workers, [&](int k) -> json {
      const auto s = proj.project(hs[k]);
      const auto s2 = proj.project(s.h1);
      return {{"divergence", s.divergence},
              {"killing_defect", s.killing_defect},
              {"orthogonality", s.orthogonality},
              {"idempotence", s2.X.max_norm() / hs[k].max_norm()}};
    });
    double worst_div = 0, worst_orth = 0, worst_idem = 0, worst_kill = 0;
    for (const auto& s : samples) {
      worst_div = std::max(worst_div, s["divergence"].get<double>());
      worst_orth = std::max(worst_orth, s["orthogonality"].get<double>());
      worst_idem = std::max(worst_idem, s["idempotence"].get<double>());
      worst_kill = std::max(worst_kill, s["killing_defect"].get<double>());
    }
    orth.push_back(worst_orth);
    runs.push_back({{"resolution", n},
                    {"deflated", proj.deflated()},
                    {"samples", samples},
                    {"max_divergence", worst_div},
                    {"max_idempotence", worst_idem},
                    {"max_orthogonality", worst_orth},
                    {"max_killing_defect", worst_kill}});
    o.summary.push_back("N=" + std::to_string(n) + "  divergence " + fmt(worst_div) + "  idempotence " + fmt(worst_idem) +
                        "  orthogonality " + fmt(worst_orth) + "  deflated " + std::to_string(proj.deflated()));
  }
  o.results = {{"model", name}, {"runs", runs}, {"orthogonality_ratios", ratios(orth)}};
  return o;
}

Outcome cmd_cp_family(const Config& cfg) {
  Outcome o;
  KernelOptions opt;
  opt.gap_ratio = cfg.gap_ratio;
  json runs = json::array();
  for (int n : resolutions_of(cfg)) {
    const auto cp = cp_family(n, opt);
    json ev = json::array(), checks = json::array();
    for (double e : cp.eigenvalues) ev.push_back(e);
    for (const auto& c : cp.checks)
      checks.push_back({{"delta_h", c.delta_h},
                        {"lichnerowicz", c.lich},
                        {"hess_divergence", c.hess_divergence},
                        {"hess_lichnerowicz", c.hess_lich},
                        {"hess_norm", c.hess_norm},
                        {"degeneracy", c.degeneracy}});
    runs.push_back({{"resolution", n},
                    {"dimension", cp.basis.dimension()},
                    {"certificate", cp.basis.certificate},
                    {"gap_ratio", cfg.gap_ratio},
                    {"eigenvalues", ev},
                    {"checks", checks},
                    {"note", cp.basis.note}});
    o.summary.push_back("N=" + std::to_string(n) + "  dim " + std::to_string(cp.basis.dimension()) + "  certificate " +
                        fmt(cp.basis.certificate));
  }
  o.results = {{"runs", runs}};
  return o;
}

json criterion_json(const rigidity::CriterionResult& c) {
  json inputs = json::object();
  for (const auto& [k, v] : c.inputs) inputs[k] = v;
  return {{"name", c.name},
          {"inputs", inputs},
          {"outcome", rigidity::to_string(c.outcome)},
          {"evidence", c.evidence},
          {"external", c.external}};
}

void add_criterion_summary(Outcome& o, const rigidity::CriterionResult& c) {
  o.summary.push_back(c.name + ": " + rigidity::to_string(c.outcome) + (c.external ? "  [external]" : ""));
  for (const auto& e : c.evidence) o.summary.push_back("    " + e);
}

Outcome cmd_rigidity(const Config& cfg) {
  Outcome o;
  const auto name = model_of(cfg, "sphere");
  if (!cfg.k_min.empty() || !cfg.k_max.empty()) {
    if (cfg.k_min.empty() || cfg.k_max.empty()) throw std::invalid_argument("--kmin and --kmax go together");
    const auto c = rigidity::pinching_test(cfg.n, parse_rational(cfg.k_min), parse_rational(cfg.k_max));
    o.results = criterion_json(c);
    add_criterion_summary(o, c);
    if (c.outcome != rigidity::Outcome::certifies) o.exit_code = kNotCertified;
    return o;
  }
  if (cfg.grid > 0) {
    if (name != "s2" && name != "sphere") throw PreconditionError("grid diameter is available for the round 2-sphere only");
    const auto g = grid::round_sphere_metric(ChartAtlas::sphere(cfg.grid), parse_rational(cfg.radius_sq).convert_to<double>());
    const auto d = rigidity::diameter_functional(g);
    const auto c = rigidity::diameter_test(g);
    o.results = criterion_json(c);
    o.results["value"] = {{"D", d.value}, {"diameter", d.diameter}, {"mean_scalar", d.mean_scalar},
                          {"method", d.method}, {"resolution", cfg.grid}, {"threshold", rigidity::diameter_threshold()}};
    add_criterion_summary(o, c);
    if (c.outcome != rigidity::Outcome::certifies) o.exit_code = kNotCertified;
    return o;
  }
  const auto v = rigidity::rank_one_verdict(model::make_model(name, model_params(cfg)));
  json crit = json::array();
  for (const auto& c : v.criteria) {
    crit.push_back(criterion_json(c));
    add_criterion_summary(o, c);
  }
  o.results = {{"model", v.model.name()}, {"criteria", crit}, {"overall", rigidity::to_string(v.overall)}};
  o.summary.push_back("overall: " + rigidity::to_string(v.overall));
  if (v.overall == rigidity::Overall::undecided) o.exit_code = kNotCertified;
  return o;
}

json summands_json(const std::vector<rep::Summand>& s) {
  json out = json::array();
  for (const auto& x : s)
    out.push_back({{"highest_weight", rep::to_string(x.highest)}, {"multiplicity", x.multiplicity}, {"dimension", x.dimension}});
  return out;
}

Outcome cmd_repcount(const Config& cfg) {
  Outcome o;
  const auto c = rep::dim_Z_cpn(cfg.n);
  o.results = {{"n", c.n},
               {"dim_Z", c.dim_Z},
               {"dim_F", c.dim_F},
               {"dim_ker_T", c.dim_ker_T},
               {"hom_multiplicity", c.hom_multiplicity},
               {"dim_im_psi1", c.dim_im_psi1},
               {"dim_im_psi2", c.dim_im_psi2},
               {"adjoint_decomposition", summands_json(c.adjoint_decomposition)},
               {"sym2_decomposition", summands_json(c.sym2_decomposition)}};
  o.summary.push_back("m = " + std::to_string(c.hom_multiplicity) + ", dim Z = " + std::to_string(c.dim_Z) +
                      ", dim ker T = " + std::to_string(c.dim_ker_T));
  return o;
}

Outcome cmd_report_merge(const Config& cfg) {
  Outcome o;
  if (cfg.inputs.empty()) throw std::invalid_argument("report-merge needs at least one input report");
  json reports = json::array();
  for (const auto& path : cfg.inputs) {
    std::ifstream f(path);
    if (!f) throw PreconditionError("cannot read " + path);
    json r;
    try {
      r = json::parse(f);
    } catch (const json::exception& e) {
      throw PreconditionError(path + ": " + e.what());
    }
    if (!r.contains("schema_version") || r["schema_version"] != kSchemaVersion)
      throw PreconditionError(path + ": unsupported schema_version");
    reports.push_back({{"source", path}, {"report", r}});
  }
  o.results = {{"reports", reports}};
  o.summary.push_back("merged " + std::to_string(reports.size()) + " reports");
  return o;
}

}  // namespace

void Config::validate() const {
  const auto res = resolutions.empty() ? default_resolutions(command) : resolutions;
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (res[i] < 8) throw std::invalid_argument("resolutions must be >= 8");
    if (i > 0 && res[i] <= res[i - 1]) throw std::invalid_argument("resolutions must be strictly increasing");
  }
  if (!(gap_ratio > 0.0 && gap_ratio < 1.0)) throw std::invalid_argument("gap_ratio must lie in (0, 1)");
  if (kmax < 1) throw std::invalid_argument("kmax must be >= 1");
  if (samples < 1 || directions < 1) throw std::invalid_argument("samples and directions must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (eps.empty()) throw std::invalid_argument("eps list is empty");
  for (double e : eps)
    if (!(e > 0.0)) throw std::invalid_argument("eps values must be positive");
}

json Config::to_json() const {
  return {{"command", command},
          {"models", models},
          {"n", n},
          {"radius_sq", radius_sq},
          {"resolutions", resolutions.empty() ? default_resolutions(command) : resolutions},
          {"gap_ratio", gap_ratio},
          {"soliton_tolerance", soliton_tolerance > 0 ? json(soliton_tolerance) : json("resolution default")},
          {"quadrature_tolerance", quadrature_tolerance},
          {"seed", seed},
          {"bandlimit", bandlimit},
          {"kmax", kmax},
          {"samples", samples},
          {"directions", directions},
          {"eps", eps},
          {"workers", workers},
          {"inputs", inputs},
          {"kmin", k_min},
          {"kmax_curvature", k_max},
          {"grid", grid}};
}

Outcome run(const Config& cfg) {
  const std::string& c = cfg.command;
  if (c == "model-list") return cmd_model_list(cfg);
  if (c == "spectrum") return cmd_spectrum(cfg);
  if (c == "residual") return cmd_residual(cfg);
  if (c == "linearize-check") return cmd_linearize_check(cfg);
  if (c == "bianchi-check") return cmd_bianchi_check(cfg);
  if (c == "kernel-Z") return cmd_kernel(cfg, true);
  if (c == "kernel-E") return cmd_kernel(cfg, false);
  if (c == "slice-project") return cmd_slice_project(cfg);
  if (c == "cp-family") return cmd_cp_family(cfg);
  if (c == "rigidity") return cmd_rigidity(cfg);
  if (c == "repcount") return cmd_repcount(cfg);
  if (c == "report-merge") return cmd_report_merge(cfg);
  throw std::invalid_argument("unknown command: " + c);
}

}  // namespace solitonkit::cli
