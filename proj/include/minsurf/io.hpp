#pragma once

#include "minsurf/surfaces.hpp"

#include <string>

namespace minsurf {

/// Reads the ASCII XYZ format: one `x y z` or `x y z nx ny nz` per line,
/// whitespace separated, `#` starts a comment line. Throws ParseError with
/// the offending line number; mixing 3- and 6-field lines is an error.
PointCloud read_xyz(const std::string& path);

/// Writes the cloud in the same format (normals included when present),
/// round-trip exact.
void write_xyz(const PointCloud& cloud, const std::string& path);

/// Round-trip-exact decimal rendering used by every CSV/XYZ emitter.
std::string format_double(double value);

}  // namespace minsurf
