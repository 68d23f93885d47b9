#include "ogsnet/correlation.hpp"

#include <cmath>
#include <stdexcept>

namespace ogsnet {

namespace {

void require_aligned(const std::vector<SiteSeries>& series) {
    for (std::size_t k = 1; k < series.size(); ++k)
        if (series[k].timestamps != series[0].timestamps)
            throw std::invalid_argument("site series are not time-aligned");
}

}  // namespace

PearsonResult pearson(std::span<const std::uint8_t> a,
                      std::span<const std::uint8_t> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("pearson: series lengths differ");
    const std::size_t n = a.size();
    if (n < 2) throw std::invalid_argument("pearson: need n >= 2");

    // For binary data sum(x^2) == sum(x); exact integer sums feed the
    // population moments.
    std::int64_t sa = 0, sb = 0, sab = 0;
    for (std::size_t t = 0; t < n; ++t) {
        sa += a[t];
        sb += b[t];
        sab += std::int64_t(a[t]) * b[t];
    }
    const double pa = double(sa) / double(n);
    const double pb = double(sb) / double(n);
    const double va = pa * (1.0 - pa);
    const double vb = pb * (1.0 - pb);
    if (va == 0.0 || vb == 0.0) return {0.0, true};
    const double cov = double(sab) / double(n) - pa * pb;
    double r = cov / std::sqrt(va * vb);
    r = std::min(1.0, std::max(-1.0, r));
    return {r, false};
}

double covariance_pair(std::span<const std::uint8_t> a,
                       std::span<const std::uint8_t> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("covariance_pair: series lengths differ");
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("covariance_pair: empty series");
    std::int64_t sa = 0, sb = 0, sab = 0;
    for (std::size_t t = 0; t < n; ++t) {
        sa += a[t];
        sb += b[t];
        sab += std::int64_t(a[t]) * b[t];
    }
    return double(sab) / double(n) -
           (double(sa) / double(n)) * (double(sb) / double(n));
}

CorrelationSurface correlation_surface(const CloudMaskSeries& series,
                                       const SiteSeries& site_series) {
    if (series.timestamps != site_series.timestamps)
        throw std::invalid_argument(
            "correlation_surface: site series not aligned with grid series");
    const std::size_t npix = series.spec.n_pixels();
    const std::size_t n = series.n_frames();
    if (n < 2)
        throw std::invalid_argument("correlation_surface: need n >= 2 frames");

    // One streaming pass: per-pixel sums of a and a*b; b moments are scalar.
    std::vector<std::int64_t> sa(npix, 0), sab(npix, 0);
    std::int64_t sb = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const std::uint8_t* f = series.frame(t);
        const std::uint8_t bt = site_series.binary[t];
        sb += bt;
        if (bt) {
            for (std::size_t p = 0; p < npix; ++p) {
                sa[p] += f[p];
                sab[p] += f[p];
            }
        } else {
            for (std::size_t p = 0; p < npix; ++p) sa[p] += f[p];
        }
    }

    const double pb = double(sb) / double(n);
    const double vb = pb * (1.0 - pb);

    CorrelationSurface out;
    out.spec = series.spec;
    out.site = site_series.site;
    out.r.resize(npix);
    out.zero_variance.assign(npix, 0);
    for (std::size_t p = 0; p < npix; ++p) {
        const double pa = double(sa[p]) / double(n);
        const double va = pa * (1.0 - pa);
        if (va == 0.0 || vb == 0.0) {
            out.r[p] = 0.0;
            out.zero_variance[p] = 1;
            continue;
        }
        const double cov = double(sab[p]) / double(n) - pa * pb;
        out.r[p] = std::min(1.0, std::max(-1.0, cov / std::sqrt(va * vb)));
    }
    return out;
}

CorrelationMatrix correlation_matrix(const std::vector<SiteSeries>& series) {
    if (series.size() < 2)
        throw std::invalid_argument("correlation_matrix: need N >= 2 sites");
    require_aligned(series);

    const int n = int(series.size());
    CorrelationMatrix out;
    out.r.assign(std::size_t(n) * n, 0.0);
    out.zero_variance.assign(std::size_t(n), 0);
    for (const SiteSeries& s : series) out.sites.push_back(s.site);

    for (int k = 0; k < n; ++k) {
        const double om = series[std::size_t(k)].omega_binary();
        if (om == 0.0 || om == 1.0) out.zero_variance[std::size_t(k)] = 1;
        out.r[std::size_t(k) * n + k] = 1.0;
    }
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            const PearsonResult pr = pearson(series[std::size_t(k)].binary,
                                             series[std::size_t(l)].binary);
            out.r[std::size_t(k) * n + l] = pr.r;
            out.r[std::size_t(l) * n + k] = pr.r;
        }
    }
    return out;
}

MeanAbsCorrelation mean_abs_correlation(const CorrelationMatrix& m) {
    const int n = m.n();
    if (n < 2)
        throw std::invalid_argument("mean_abs_correlation: need N >= 2 sites");
    std::vector<double> entries;
    entries.reserve(std::size_t(n) * (n - 1) / 2);
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l)
            entries.push_back(std::fabs(m.at(k, l)));

    double mean = 0.0;
    for (double v : entries) mean += v;
    mean /= double(entries.size());
    double ss = 0.0;
    for (double v : entries) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / double(entries.size()))};
}

std::vector<double> covariance_matrix(const std::vector<SiteSeries>& series) {
    if (series.empty())
        throw std::invalid_argument("covariance_matrix: need at least one site");
    require_aligned(series);
    const int n = int(series.size());
    std::vector<double> gamma(std::size_t(n) * n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            const double g = covariance_pair(series[std::size_t(k)].binary,
                                             series[std::size_t(l)].binary);
            gamma[std::size_t(k) * n + l] = g;
            gamma[std::size_t(l) * n + k] = g;
        }
    return gamma;
}

}  // namespace ogsnet
