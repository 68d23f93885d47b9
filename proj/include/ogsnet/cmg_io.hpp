#pragma once

#include <string>
#include <vector>

#include "ogsnet/grid.hpp"

namespace ogsnet {

// CMG container: a text header (magic "CMG1", key/value lines, "data"
// terminator) followed by the frames. The default encoding bit-packs each
// frame row-major, MSB first, padded to a byte boundary per frame; the
// "text" encoding stores whitespace-separated 0/1 cells for hand-written
// fixtures.
void write_cmg(const std::string& path, const CloudMaskSeries& series,
               bool text_encoding = false);
CloudMaskSeries read_cmg(const std::string& path);

/// Sites table: whitespace-separated columns name, lat_deg, lon_deg,
/// roi_radius_px; '#' starts a comment.
std::vector<Site> read_sites(const std::string& path);
void write_sites(const std::string& path, const std::vector<Site>& sites);

/// Text matrix export, one row per latitude with the northernmost row first.
void write_text_matrix(const std::string& path, const GridSpec& spec,
                       const std::vector<double>& values);

/// 8-bit grayscale PGM (P5), north up, values min/max scaled; the scaling
/// range is returned so callers can record it.
void write_pgm(const std::string& path, const GridSpec& spec,
               const std::vector<double>& values, double& scale_min,
               double& scale_max);

/// Region mask: PGM (P2/P5) or text matrix the size of the grid, north up.
/// File value 0 marks an excluded pixel. Returns 1 per EXCLUDED pixel in
/// grid (south-origin) order.
std::vector<std::uint8_t> read_region_mask(const std::string& path,
                                           const GridSpec& spec);

}  // namespace ogsnet
