#include "solitonkit/op_cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <vector>

namespace solitonkit::grid {

namespace {

constexpr char kMagic[8] = {'S', 'K', 'O', 'P', 'M', 'A', 'T', '1'};

}  // namespace

ContentHash& ContentHash::add(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h_ ^= p[i];
    h_ *= 1099511628211ULL;
  }
  return *this;
}

ContentHash& ContentHash::add(const std::string& s) {
  const std::uint64_t n = s.size();
  add(&n, sizeof n);
  return add(s.data(), s.size());
}

ContentHash& ContentHash::add(const Eigen::VectorXd& v) {
  const std::uint64_t n = static_cast<std::uint64_t>(v.size());
  add(&n, sizeof n);
  return add(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

std::string ContentHash::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

std::string operator_key(const std::string& op_spec, const MetricField& g, const ScalarField& f) {
  ContentHash h;
  h.add(op_spec).add(g.atlas()->descriptor()).add(g.tensor().values()).add(f.values());
  return h.hex();
}

OperatorCache::OperatorCache(std::string dir) : dir_(std::move(dir)) {
  if (dir_.empty()) {
    const char* env = std::getenv(kCacheEnvVar);
    dir_ = (env && *env) ? env : ".solitonkit-cache";
  }
}

std::optional<SparseMatrix> OperatorCache::load(const std::string& key) const {
  std::ifstream is(std::filesystem::path(dir_) / (key + ".skop"), std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  std::int64_t rows = 0, cols = 0, nnz = 0;
  if (!is.read(magic, 8) || std::string(magic, 8) != std::string(kMagic, 8)) return std::nullopt;
  is.read(reinterpret_cast<char*>(&rows), 8).read(reinterpret_cast<char*>(&cols), 8).read(reinterpret_cast<char*>(&nnz), 8);
  if (!is || rows < 0 || cols < 0 || nnz < 0) return std::nullopt;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nnz));
  for (std::int64_t k = 0; k < nnz; ++k) {
    std::int64_t r = 0, c = 0;
    double v = 0.0;
    is.read(reinterpret_cast<char*>(&r), 8).read(reinterpret_cast<char*>(&c), 8).read(reinterpret_cast<char*>(&v), 8);
    if (!is) return std::nullopt;
    trip.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

void OperatorCache::store(const std::string& key, const SparseMatrix& m) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  const auto final_path = std::filesystem::path(dir_) / (key + ".skop");
  const auto tmp_path = std::filesystem::path(dir_) / (key + ".skop.tmp");
  {
    std::ofstream os(tmp_path, std::ios::binary);
    if (!os) return;
    os.write(kMagic, 8);
    const std::int64_t rows = m.rows(), cols = m.cols(), nnz = m.nonZeros();
    os.write(reinterpret_cast<const char*>(&rows), 8).write(reinterpret_cast<const char*>(&cols), 8);
    os.write(reinterpret_cast<const char*>(&nnz), 8);
    for (int r = 0; r < m.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
        const std::int64_t rr = it.row(), cc = it.col();
        const double v = it.value();
        os.write(reinterpret_cast<const char*>(&rr), 8).write(reinterpret_cast<const char*>(&cc), 8);
        os.write(reinterpret_cast<const char*>(&v), 8);
      }
  }
  std::filesystem::rename(tmp_path, final_path, ec);
}

}  // namespace solitonkit::grid
