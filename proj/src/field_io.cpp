#include "solitonkit/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace solitonkit::grid {

namespace {

constexpr char kMagic[8] = {'S', 'K', 'F', 'I', 'E', 'L', 'D', '1'};

template <class T>
void put(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw PreconditionError("field container: truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

AtlasPtr atlas_from_descriptor(const std::string& descriptor) {
  std::istringstream is(descriptor);
  std::string kind, tok;
  std::getline(is, kind, ';');
  int res = 0;
  std::vector<std::array<double, 4>> charts;
  while (std::getline(is, tok, ';')) {
    if (tok.rfind("res=", 0) == 0) {
      res = std::stoi(tok.substr(4));
    } else if (tok.rfind("chart=", 0) == 0) {
      std::array<double, 4> b{};
      std::istringstream cs(tok.substr(6));
      std::string part;
      for (int i = 0; i < 4 && std::getline(cs, part, ','); ++i) b[i] = std::stod(part);
      charts.push_back(b);
    }
  }
  AtlasPtr atlas;
  if (kind == "torus" && charts.size() == 1)
    atlas = ChartAtlas::torus(res, charts[0][2] - charts[0][0], charts[0][3] - charts[0][1]);
  else if (kind == "sphere")
    atlas = ChartAtlas::sphere(res);
  else
    throw PreconditionError("unknown atlas descriptor: " + descriptor);
  if (atlas->descriptor() != descriptor) throw PreconditionError("atlas descriptor does not round-trip: " + descriptor);
  return atlas;
}

void write_field_raw(std::ostream& os, const ChartAtlas& atlas, FieldKind kind, const Eigen::VectorXd& values) {
  os.write(kMagic, 8);
  const std::string d = atlas.descriptor();
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.size()));
  os.write(d.data(), static_cast<std::streamsize>(d.size()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(kind));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(component_count(kind)));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) put<double>(os, values(i));
  if (!os) throw IntegrityError("field container: write failed");
}

FieldHeader read_field_raw(std::istream& is, Eigen::VectorXd& values) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw PreconditionError("field container: bad magic");
  FieldHeader h;
  const auto len = get<std::uint32_t>(is);
  h.atlas_descriptor.resize(len);
  if (!is.read(h.atlas_descriptor.data(), len)) throw PreconditionError("field container: truncated");
  const auto kind = get<std::uint32_t>(is);
  if (kind > 3) throw PreconditionError("field container: unknown field kind");
  h.kind = static_cast<FieldKind>(kind);
  h.components = static_cast<int>(get<std::uint32_t>(is));
  if (h.components != component_count(h.kind)) throw PreconditionError("field container: component count mismatch");
  h.value_count = get<std::uint64_t>(is);
  values.resize(static_cast<Eigen::Index>(h.value_count));
  for (std::uint64_t i = 0; i < h.value_count; ++i) values(static_cast<Eigen::Index>(i)) = get<double>(is);
  return h;
}

template <FieldKind K>
void write_field(const std::string& path, const Field<K>& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw PreconditionError("cannot open for writing: " + path);
  write_field_raw(os, *f.atlas(), K, f.values());
}

template <FieldKind K>
Field<K> read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("cannot open: " + path);
  Eigen::VectorXd v;
  const FieldHeader h = read_field_raw(is, v);
  if (h.kind != K) throw PreconditionError("field container holds a " + to_string(h.kind) + " field");
  return Field<K>::from_full(atlas_from_descriptor(h.atlas_descriptor), v);
}

FieldHeader peek_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("cannot open: " + path);
  Eigen::VectorXd v;
  return read_field_raw(is, v);
}

template void write_field(const std::string&, const ScalarField&);
template void write_field(const std::string&, const VectorField&);
template void write_field(const std::string&, const CovectorField&);
template void write_field(const std::string&, const Sym2Field&);
template ScalarField read_field<FieldKind::scalar>(const std::string&);
template VectorField read_field<FieldKind::vector>(const std::string&);
template CovectorField read_field<FieldKind::covector>(const std::string&);
template Sym2Field read_field<FieldKind::sym2>(const std::string&);

}  // namespace solitonkit::grid
