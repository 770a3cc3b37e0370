#pragma once

// On-disk cache of assembled sparse matrices keyed by a content hash.
//
// Layout: <dir>/<16 hex digits>.skop, one file per operator. The directory
// defaults to $SOLITONKIT_CACHE_DIR and falls back to ".solitonkit-cache".

#include <cstdint>
#include <optional>
#include <string>

#include "solitonkit/field.hpp"

namespace solitonkit::grid {

inline constexpr const char* kCacheEnvVar = "SOLITONKIT_CACHE_DIR";

/// 64-bit FNV-1a.
class ContentHash {
 public:
  ContentHash& add(const void* data, std::size_t bytes);
  ContentHash& add(const std::string& s);
  ContentHash& add(const Eigen::VectorXd& v);
  std::uint64_t value() const { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 1469598103934665603ULL;
};

std::string operator_key(const std::string& op_spec, const MetricField& g, const ScalarField& f);

class OperatorCache {
 public:
  /// Empty dir means the environment variable or the default.
  explicit OperatorCache(std::string dir = "");
  const std::string& directory() const { return dir_; }

  std::optional<SparseMatrix> load(const std::string& key) const;
  void store(const std::string& key, const SparseMatrix& m) const;

  int hits() const { return hits_; }
  int misses() const { return misses_; }

  /// Loads the matrix for key or builds and stores it.
  template <class Build>
  SparseMatrix get_or_build(const std::string& key, Build&& build) {
    if (auto m = load(key)) {
      ++hits_;
      return *m;
    }
    ++misses_;
    SparseMatrix m = build();
    store(key, m);
    return m;
  }

 private:
  std::string dir_;
  int hits_ = 0;
  int misses_ = 0;
};

}  // namespace solitonkit::grid
