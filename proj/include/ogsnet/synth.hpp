#pragma once

#include <cstdint>
#include <vector>

#include "ogsnet/grid.hpp"

namespace ogsnet {

/// Parameters for the synthetic cloud-mask generator. Each frame is an
/// independent thresholded Gaussian random field: white noise smoothed with
/// a periodic Gaussian kernel of standard deviation corr_length_px and
/// renormalised to unit marginal variance, so cell (i,j) is cloudy exactly
/// when the field falls below phi_inv(omega_ij).
struct SynthSpec {
    GridSpec grid;
    std::int64_t n_frames = 1;
    double corr_length_px = 1.0;
    std::vector<double> omega_field;  // per-pixel target in (0,1)
    std::uint64_t seed = 0;
    std::int64_t t0 = 0;
    std::int64_t stride_s = 86400;
    std::string source_id = "synth";
};

CloudMaskSeries synth_generate(const SynthSpec& spec);

/// Convenience: constant omega everywhere.
CloudMaskSeries synth_generate_uniform(const GridSpec& grid,
                                       std::int64_t n_frames,
                                       double corr_length_px, double omega,
                                       std::uint64_t seed);

}  // namespace ogsnet
