#include "ogsnet/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ogsnet {

void GridSpec::validate() const {
    if (n_lat < 1 || n_lon < 1)
        throw std::invalid_argument("GridSpec: n_lat and n_lon must be >= 1");
    if (!(lat_min < lat_max) || !(lon_min < lon_max))
        throw std::invalid_argument("GridSpec: bounds must satisfy min < max");
    if (std::fabs(dlat() - dlon()) > 1e-6 * std::max(dlat(), dlon()))
        throw std::invalid_argument(
            "GridSpec: pixel spacing must be uniform in lat and lon");
}

void CloudMaskSeries::validate() const {
    spec.validate();
    if (timestamps.empty())
        throw std::invalid_argument("CloudMaskSeries: need at least one frame");
    if (frames.size() != timestamps.size() * spec.n_pixels())
        throw std::invalid_argument("CloudMaskSeries: frame buffer size mismatch");
    for (std::size_t t = 1; t < timestamps.size(); ++t)
        if (timestamps[t] <= timestamps[t - 1])
            throw std::invalid_argument(
                "CloudMaskSeries: timestamps must be strictly increasing");
    for (std::uint8_t v : frames)
        if (v > 1) throw std::invalid_argument("CloudMaskSeries: non-binary cell");
}

double SiteSeries::omega_fraction() const {
    double sum = 0.0;
    for (double v : cloud_fraction) sum += v;
    return cloud_fraction.empty() ? 0.0 : sum / double(cloud_fraction.size());
}

double SiteSeries::omega_binary() const {
    std::int64_t sum = 0;
    for (std::uint8_t v : binary) sum += v;
    return binary.empty() ? 0.0 : double(sum) / double(binary.size());
}

// Proleptic Gregorian calendar <-> days since 1970-01-01 (Hinnant's
// algorithm); enough calendar support for monthly bucketing without a tz
// database.
namespace {

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = unsigned(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + std::int64_t(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = unsigned(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = std::int64_t(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{int(y + (m <= 2)), m, d};
}

}  // namespace

CivilDate civil_from_epoch(std::int64_t epoch_s) {
    std::int64_t days = epoch_s / 86400;
    if (epoch_s < 0 && epoch_s % 86400 != 0) --days;
    return civil_from_days(days);
}

std::int64_t epoch_from_civil(int year, unsigned month, unsigned day) {
    return days_from_civil(year, month, day) * 86400;
}

AvailabilityGrid availability_grid(const CloudMaskSeries& series) {
    series.validate();
    const std::size_t npix = series.spec.n_pixels();
    const std::size_t n = series.n_frames();

    // Integer accumulation keeps the mean exact for any frame count.
    std::vector<std::int64_t> counts(npix, 0);
    for (std::size_t t = 0; t < n; ++t) {
        const std::uint8_t* f = series.frame(t);
        for (std::size_t p = 0; p < npix; ++p) counts[p] += f[p];
    }

    AvailabilityGrid out;
    out.spec = series.spec;
    out.omega.resize(npix);
    out.n_samples.assign(npix, std::int64_t(n));
    for (std::size_t p = 0; p < npix; ++p)
        out.omega[p] = double(counts[p]) / double(n);
    return out;
}

std::pair<int, int> site_pixel(const GridSpec& spec, const Site& site) {
    spec.validate();
    if (site.lat < -90.0 || site.lat > 90.0)
        throw std::invalid_argument("site latitude outside [-90, 90]");
    int i = int(std::floor((site.lat - spec.lat_min) / spec.dlat()));
    int j = int(std::floor((site.lon - spec.lon_min) / spec.dlon()));
    if (site.lat == spec.lat_max) i = spec.n_lat - 1;
    if (site.lon == spec.lon_max) j = spec.n_lon - 1;
    if (i < 0 || i >= spec.n_lat || j < 0 || j >= spec.n_lon)
        throw std::invalid_argument("site '" + site.name + "' outside grid");
    const int r = site.roi_radius_px;
    if (r < 0) throw std::invalid_argument("roi_radius_px must be >= 0");
    if (i - r < 0 || i + r >= spec.n_lat || j - r < 0 || j + r >= spec.n_lon)
        throw std::invalid_argument("site '" + site.name +
                                    "' ROI exceeds grid bounds");
    return {i, j};
}

SiteSeries extract_site_series(const CloudMaskSeries& series, const Site& site,
                               double threshold) {
    const auto [ci, cj] = site_pixel(series.spec, site);
    const int r = site.roi_radius_px;
    const std::size_t n = series.n_frames();
    const int width = 2 * r + 1;
    const double cells = double(width) * double(width);

    SiteSeries out;
    out.site = site;
    out.timestamps = series.timestamps;
    out.threshold = threshold;
    out.source_id = series.source_id;
    out.cloud_fraction.resize(n);
    out.binary.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::uint8_t* f = series.frame(t);
        std::int64_t sum = 0;
        for (int i = ci - r; i <= ci + r; ++i)
            for (int j = cj - r; j <= cj + r; ++j)
                sum += f[series.spec.index(i, j)];
        const double frac = double(sum) / cells;
        out.cloud_fraction[t] = frac;
        out.binary[t] = frac >= threshold ? 1 : 0;
    }
    return out;
}

namespace {

double population_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / double(v.size()));
}

}  // namespace

SeasonalProfile seasonal_profile(const std::vector<SiteSeries>& by_source,
                                 double outlier_z) {
    if (by_source.empty())
        throw std::invalid_argument("seasonal_profile: need at least one source");

    SeasonalProfile out;

    // Per source: month -> mean cloud fraction over all frames in that
    // calendar month, plus per (source, year, month) means for the
    // across-year spread.
    const std::size_t ns = by_source.size();
    std::vector<std::array<double, 12>> src_avail(ns);
    std::vector<std::array<bool, 12>> src_present(ns);
    std::vector<std::array<double, 12>> src_year_std(ns);

    for (std::size_t s = 0; s < ns; ++s) {
        const SiteSeries& ss = by_source[s];
        std::array<double, 12> sum{};
        std::array<std::int64_t, 12> cnt{};
        std::map<std::pair<int, int>, std::pair<double, std::int64_t>> ym;
        for (std::size_t t = 0; t < ss.size(); ++t) {
            const CivilDate cd = civil_from_epoch(ss.timestamps[t]);
            const int m = int(cd.month) - 1;
            sum[m] += ss.cloud_fraction[t];
            cnt[m] += 1;
            auto& acc = ym[{cd.year, m}];
            acc.first += ss.cloud_fraction[t];
            acc.second += 1;
        }
        for (int m = 0; m < 12; ++m) {
            src_present[s][m] = cnt[m] > 0;
            src_avail[s][m] = cnt[m] > 0 ? 1.0 - sum[m] / double(cnt[m]) : 0.0;
        }
        for (int m = 0; m < 12; ++m) {
            std::vector<double> yearly;
            for (const auto& [key, acc] : ym)
                if (key.second == m)
                    yearly.push_back(1.0 - acc.first / double(acc.second));
            src_year_std[s][m] = population_std(yearly);
        }
    }

    for (int m = 0; m < 12; ++m) {
        std::vector<double> vals;
        double year_var = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
            if (!src_present[s][m]) continue;
            vals.push_back(src_avail[s][m]);
            year_var += src_year_std[s][m] * src_year_std[s][m];
        }
        if (vals.empty()) {
            out.present[m] = false;
            continue;
        }
        out.present[m] = true;
        double mean = 0.0;
        for (double v : vals) mean += v;
        out.availability[m] = mean / double(vals.size());
        const double src_std = population_std(vals);
        year_var /= double(vals.size());
        out.stddev[m] = std::sqrt(src_std * src_std + year_var);
    }

    // Outlier flagging on annual availability: sources whose annual mean sits
    // more than outlier_z cross-source standard deviations from the
    // cross-source mean. Flag-only; with n sources the attainable z is
    // bounded by sqrt(n - 1).
    if (ns >= 3) {
        std::vector<double> annual(ns);
        for (std::size_t s = 0; s < ns; ++s)
            annual[s] = 1.0 - by_source[s].omega_fraction();
        double mean = 0.0;
        for (double a : annual) mean += a;
        mean /= double(ns);
        const double sd = population_std(annual);
        if (sd > 0.0) {
            for (std::size_t s = 0; s < ns; ++s)
                if (std::fabs(annual[s] - mean) > outlier_z * sd)
                    out.flagged_sources.push_back(by_source[s].source_id);
        }
    }
    return out;
}

CloudMaskSeries block_downsample(const CloudMaskSeries& series, int block) {
    series.validate();
    if (block < 1) throw std::invalid_argument("block size must be >= 1");
    if (block == 1) return series;
    if (series.spec.n_lat % block != 0 || series.spec.n_lon % block != 0)
        throw std::invalid_argument(
            "block_downsample: grid dimensions must be divisible by block");

    CloudMaskSeries out;
    out.spec = series.spec;
    out.spec.n_lat = series.spec.n_lat / block;
    out.spec.n_lon = series.spec.n_lon / block;
    out.timestamps = series.timestamps;
    out.source_id = series.source_id;
    out.frames.resize(series.n_frames() * out.spec.n_pixels());

    const int majority = (block * block) / 2;  // cloudy iff count > half
    for (std::size_t t = 0; t < series.n_frames(); ++t) {
        const std::uint8_t* f = series.frame(t);
        std::uint8_t* g = out.frame(t);
        for (int bi = 0; bi < out.spec.n_lat; ++bi) {
            for (int bj = 0; bj < out.spec.n_lon; ++bj) {
                int count = 0;
                for (int i = bi * block; i < (bi + 1) * block; ++i)
                    for (int j = bj * block; j < (bj + 1) * block; ++j)
                        count += f[series.spec.index(i, j)];
                g[out.spec.index(bi, bj)] = count > majority ? 1 : 0;
            }
        }
    }
    return out;
}

}  // namespace ogsnet
