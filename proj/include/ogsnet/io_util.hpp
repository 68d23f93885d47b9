#pragma once

#include <string>

namespace ogsnet {

/// Shortest round-trip decimal form of a double; stable across runs so
/// output tables are byte-reproducible.
std::string fmt_double(double v);

/// Write a file atomically: content goes to a sibling temp file which is
/// renamed over the target, so failures never leave partial output behind.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace ogsnet
