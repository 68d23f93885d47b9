#include "ogsnet/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "ogsnet/normal.hpp"
#include "ogsnet/philox.hpp"

namespace ogsnet {

namespace {

// Gaussian kernel folded onto a periodic axis of length n. Folding keeps the
// circular convolution exact on grids smaller than the kernel support.
std::vector<double> folded_kernel(double sigma, int n) {
    const int radius = std::max(1, int(std::ceil(3.0 * sigma)));
    std::vector<double> folded(std::size_t(n), 0.0);
    for (int d = -radius; d <= radius; ++d) {
        const double w = std::exp(-0.5 * (d / sigma) * (d / sigma));
        int idx = d % n;
        if (idx < 0) idx += n;
        folded[std::size_t(idx)] += w;
    }
    return folded;
}

double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

CloudMaskSeries synth_generate(const SynthSpec& spec) {
    spec.grid.validate();
    if (spec.n_frames < 1)
        throw std::invalid_argument("synth_generate: n_frames must be >= 1");
    if (!(spec.corr_length_px > 0.0))
        throw std::invalid_argument("synth_generate: corr_length_px must be > 0");
    const std::size_t npix = spec.grid.n_pixels();
    if (spec.omega_field.size() != npix)
        throw std::invalid_argument("synth_generate: omega_field size mismatch");

    // Precompute per-pixel latent thresholds; rejects degenerate omega.
    std::vector<double> threshold(npix);
    for (std::size_t p = 0; p < npix; ++p) {
        const double om = spec.omega_field[p];
        if (!(om > 0.0 && om < 1.0))
            throw std::invalid_argument(
                "synth_generate: omega must be strictly inside (0,1)");
        threshold[p] = phi_inv(om);
    }

    const int nlat = spec.grid.n_lat;
    const int nlon = spec.grid.n_lon;
    const std::vector<double> krow = folded_kernel(spec.corr_length_px, nlon);
    const std::vector<double> kcol = folded_kernel(spec.corr_length_px, nlat);
    const double norm = l2(krow) * l2(kcol);

    CloudMaskSeries out;
    out.spec = spec.grid;
    out.source_id = spec.source_id;
    out.timestamps.resize(std::size_t(spec.n_frames));
    for (std::int64_t t = 0; t < spec.n_frames; ++t)
        out.timestamps[std::size_t(t)] = spec.t0 + t * spec.stride_s;
    out.frames.resize(std::size_t(spec.n_frames) * npix);

    std::vector<double> white(npix), tmp(npix), field(npix);
    for (std::int64_t t = 0; t < spec.n_frames; ++t) {
        // White noise keyed by (seed, frame, pixel pair): bit-reproducible
        // and independent of any other consumer of the seed.
        for (std::size_t p = 0; p < npix; p += 2) {
            double z0, z1;
            normal_pair(spec.seed, RandomDomain::synth_field, std::uint64_t(t),
                        std::uint32_t(p / 2), z0, z1);
            white[p] = z0;
            if (p + 1 < npix) white[p + 1] = z1;
        }

        // Separable circular convolution: rows then columns.
        for (int i = 0; i < nlat; ++i) {
            for (int j = 0; j < nlon; ++j) {
                double s = 0.0;
                for (int d = 0; d < nlon; ++d)
                    s += krow[std::size_t(d)] *
                         white[spec.grid.index(i, (j + d) % nlon)];
                tmp[spec.grid.index(i, j)] = s;
            }
        }
        for (int j = 0; j < nlon; ++j) {
            for (int i = 0; i < nlat; ++i) {
                double s = 0.0;
                for (int d = 0; d < nlat; ++d)
                    s += kcol[std::size_t(d)] *
                         tmp[spec.grid.index((i + d) % nlat, j)];
                field[spec.grid.index(i, j)] = s / norm;
            }
        }

        std::uint8_t* f = out.frame(std::size_t(t));
        for (std::size_t p = 0; p < npix; ++p)
            f[p] = field[p] < threshold[p] ? 1 : 0;
    }
    return out;
}

CloudMaskSeries synth_generate_uniform(const GridSpec& grid,
                                       std::int64_t n_frames,
                                       double corr_length_px, double omega,
                                       std::uint64_t seed) {
    SynthSpec spec;
    spec.grid = grid;
    spec.n_frames = n_frames;
    spec.corr_length_px = corr_length_px;
    spec.omega_field.assign(grid.n_pixels(), omega);
    spec.seed = seed;
    return synth_generate(spec);
}

}  // namespace ogsnet
