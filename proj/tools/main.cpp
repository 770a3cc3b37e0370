#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cli_support.hpp"
#include "solitonkit/errors.hpp"
#include "solitonkit/op_cache.hpp"

using namespace solitonkit;
using namespace solitonkit::cli;

namespace {

struct Command {
  const char* name;
  const char* help;
  bool positional_model;
};

const Command kCommands[] = {
    {"model-list", "List the supported models", false},
    {"spectrum", "Closed-form Laplace spectrum of a model space", true},
    {"residual", "Soliton residual and entropy on a grid model", false},
    {"linearize-check", "Compare the linearized operator with finite differences", false},
    {"bianchi-check", "Convergence of the twisted Bianchi identity", false},
    {"kernel-Z", "Infinitesimal soliton deformations with a spectral-gap certificate", false},
    {"kernel-E", "Infinitesimal Einstein deformations with a spectral-gap certificate", false},
    {"slice-project", "Twisted slice decomposition of seeded random tensors", false},
    {"cp-family", "Hessians of first eigenfunctions on the Killing-normalized 2-sphere", false},
    {"rigidity", "Rigidity criteria and verdict for a model space", true},
    {"repcount", "Weight count for the projective-space deformation module", false},
    {"report-merge", "Merge JSON reports", false},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solitonkit: deformations of shrinking Ricci solitons"};
  app.set_config("--config", "", "INI/TOML file with option values (key = value)");
  app.require_subcommand(1);

  Config cfg;
  std::string model;
  bool print_json = false;
  app.add_option("--model", model, "Model name (see model-list)");
  app.add_option("--n", cfg.n, "Dimension parameter of the model")->capture_default_str();
  app.add_option("--radius-sq", cfg.radius_sq, "Squared radius of a round sphere, exact rational")->capture_default_str();
  app.add_option("--resolutions", cfg.resolutions, "Grid resolutions, strictly increasing")->delimiter(',');
  app.add_option("--gap-ratio", cfg.gap_ratio, "Kernel spectral-gap threshold in (0, 1)")->capture_default_str();
  app.add_option("--soliton-tol", cfg.soliton_tolerance, "Soliton residual tolerance (default: resolution-aware)");
  app.add_option("--quad-tol", cfg.quadrature_tolerance, "Normalization constraint tolerance")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--bandlimit", cfg.bandlimit, "Bandlimit of random fields")->capture_default_str();
  app.add_option("--kmax", cfg.kmax, "Largest spectrum index")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Random samples")->capture_default_str();
  app.add_option("--directions", cfg.directions, "Random directions for linearize-check")->capture_default_str();
  app.add_option("--eps", cfg.eps, "Finite-difference steps")->delimiter(',')->capture_default_str();
  app.add_option("--workers", cfg.workers, "Parallel workers for independent jobs")->capture_default_str();
  app.add_option("--out", cfg.out, "Write the JSON report to this file");
  app.add_option("--csv", cfg.csv, "Write a CSV table (spectrum)");
  app.add_option("--cache-dir", cfg.cache_dir, std::string("Operator cache directory (default $") + grid::kCacheEnvVar + ")");
  app.add_option("--kmin", cfg.k_min, "rigidity: minimal sectional curvature, exact rational");
  app.add_option("--kmax-curv", cfg.k_max, "rigidity: maximal sectional curvature, exact rational");
  app.add_option("--grid", cfg.grid, "rigidity: evaluate the diameter functional on a grid of this resolution");
  app.add_flag("--json", print_json, "Print the JSON report instead of the summary");

  for (const auto& c : kCommands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    sub->parse_complete_callback([&cfg, name = c.name] { cfg.command = name; });
    if (c.positional_model) sub->add_option("model", model, "Model name");
    if (std::string(c.name) == "report-merge") sub->add_option("inputs", cfg.inputs, "Reports to merge")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (!model.empty()) cfg.models = {model};

  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    cfg.validate();
    out = run(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const UndecidedError& e) {
    std::cerr << "undecided: " << e.what() << "\n";
    return kUndecided;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kPrecondition;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json report = {{"schema_version", kSchemaVersion},
                 {"tool", "solitonkit"},
                 {"tool_version", kToolVersion},
                 {"config", cfg.to_json()},
                 {"results", out.results},
                 {"provenance", out.provenance},
                 {"exit_code", out.exit_code},
                 {"timings", {{"total_seconds", seconds}}}};
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out);
    if (!f) {
      std::cerr << "cannot write " << cfg.out << "\n";
      return kPrecondition;
    }
    f << report.dump(2) << "\n";
  }
  if (print_json)
    std::cout << report.dump(2) << "\n";
  else
    for (const auto& line : out.summary) std::cout << line << "\n";
  return out.exit_code;
}
