#pragma once

// Field files:
//
//   PARAKKT-FIELD v1
//   dim n1 [n2] nt          (nodes per axis including boundary, time levels)
//   L1 [L2] T               (extents and horizon)
//   <value>                 (one per line, %.17g, level by level,
//   ...                      interior nodes in lexicographic order)

#include "grid.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace parakkt {

void write_field(std::ostream& out, const Field& field);
void write_field(const std::filesystem::path& path, const Field& field);

/// Reads a field; io error for malformed headers or entries, non-finite
/// values, or a grid different from `expected` when one is given.
Field read_field(std::istream& in, const Grid* expected = nullptr);
Field read_field(const std::filesystem::path& path, const Grid* expected = nullptr);

} // namespace parakkt
