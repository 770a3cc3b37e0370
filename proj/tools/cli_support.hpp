#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

namespace solitonkit::cli {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kPrecondition = 3,
  kUndecided = 4,
  kNotCertified = 5,
};

struct Config {
  std::string command;
  std::vector<std::string> models;
  int n = 2;
  std::string radius_sq = "1";  // exact rational
  std::vector<int> resolutions;
  double gap_ratio = 1e-3;
  double soliton_tolerance = -1.0;    // negative: resolution-aware default
  double quadrature_tolerance = 1e-6;  // normalization constraint
  std::uint64_t seed = 7;
  int bandlimit = 3;
  int kmax = 20;
  int samples = 10;
  int directions = 10;
  std::vector<double> eps{1e-3, 1e-4};
  int workers = 1;
  std::string out;
  std::string csv;
  std::string cache_dir;
  std::vector<std::string> inputs;  // report-merge
  std::string k_min, k_max;         // rigidity pinching inputs (exact rationals)
  int grid = 0;                     // rigidity: grid resolution for the diameter

  /// Throws std::invalid_argument with a message on an invalid configuration.
  void validate() const;
  json to_json() const;
};

/// Result of one command: the report body and the exit status it implies.
struct Outcome {
  json results;
  json provenance = json::object();
  int exit_code = kOk;
  std::vector<std::string> summary;  // human-readable lines
};

Outcome run(const Config& cfg);

/// Runs fn(i) for i in [0, n) on up to `workers` threads; results keep their index order.
inline std::vector<json> run_jobs(int n, int workers, const std::function<json(int)>& fn) {
  std::vector<json> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int w = std::max(1, std::min(workers, n));
  if (w == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < w; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace solitonkit::cli
