#pragma once

#include <string>

#include "nrrd/field.hpp"

namespace nrrd {

// Binary state checkpoint, little-endian:
//   magic "NRRD" | u32 version (=1) | u32 dim | u32 n per axis |
//   f64 lo,hi per axis | f64 time | f64 u1 row-major | f64 u2 row-major
// Round trips are bit-exact. Truncated or foreign files raise FormatError
// naming the expected byte count; unknown versions are refused outright.
void save_checkpoint(const StatePair& state, const std::string& path);
StatePair load_checkpoint(const std::string& path);

// Load and verify the state lives on `grid` (same dim, counts and extents),
// rebinding the fields to it; mismatch raises GridMismatchError.
StatePair load_checkpoint_on(const GridPtr& grid, const std::string& path);

}  // namespace nrrd
