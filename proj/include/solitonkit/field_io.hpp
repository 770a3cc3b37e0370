#pragma once

// Flat binary field container.
//
//   bytes 0..7   magic "SKFIELD1"
//   u32          atlas descriptor length, then the descriptor text
//   u32          field kind (0 scalar, 1 vector, 2 covector, 3 sym2)
//   u32          component count
//   u64          value count
//   f64[]        values, little-endian, chart-major, node-major, component-minor
// All integers are little-endian.

#include <iosfwd>
#include <string>

#include "solitonkit/field.hpp"

namespace solitonkit::grid {

struct FieldHeader {
  std::string atlas_descriptor;
  FieldKind kind = FieldKind::scalar;
  int components = 0;
  std::uint64_t value_count = 0;
};

/// Rebuilds an atlas from its descriptor string.
AtlasPtr atlas_from_descriptor(const std::string& descriptor);

void write_field_raw(std::ostream& os, const ChartAtlas& atlas, FieldKind kind, const Eigen::VectorXd& values);
FieldHeader read_field_raw(std::istream& is, Eigen::VectorXd& values);

template <FieldKind K>
void write_field(const std::string& path, const Field<K>& f);

template <FieldKind K>
Field<K> read_field(const std::string& path);

FieldHeader peek_field(const std::string& path);

}  // namespace solitonkit::grid
