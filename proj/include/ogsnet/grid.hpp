#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ogsnet {

/// Equirectangular lat/lon grid with uniform pixel spacing. Row 0 is the
/// southernmost row; pixel centers sit half a pixel inside the bounds.
struct GridSpec {
    int n_lat = 0;
    int n_lon = 0;
    double lat_min = 0.0;
    double lat_max = 0.0;
    double lon_min = 0.0;
    double lon_max = 0.0;

    std::size_t n_pixels() const {
        return std::size_t(n_lat) * std::size_t(n_lon);
    }
    double dlat() const { return (lat_max - lat_min) / n_lat; }
    double dlon() const { return (lon_max - lon_min) / n_lon; }
    double pixel_size() const { return dlat(); }
    double lat_center(int i) const { return lat_min + (i + 0.5) * dlat(); }
    double lon_center(int j) const { return lon_min + (j + 0.5) * dlon(); }
    std::size_t index(int i, int j) const {
        return std::size_t(i) * n_lon + j;
    }

    void validate() const;
    bool operator==(const GridSpec&) const = default;
};

struct Site {
    std::string name;
    double lat = 0.0;
    double lon = 0.0;
    int roi_radius_px = 0;  // half-width of the square region of interest
};

/// Time-ordered stack of binary cloud masks (0 = clear, 1 = cloud).
struct CloudMaskSeries {
    GridSpec spec;
    std::vector<std::int64_t> timestamps;  // epoch seconds, strictly increasing
    std::vector<std::uint8_t> frames;      // n_frames * n_pixels, row-major
    std::string source_id;

    std::size_t n_frames() const { return timestamps.size(); }
    const std::uint8_t* frame(std::size_t t) const {
        return frames.data() + t * spec.n_pixels();
    }
    std::uint8_t* frame(std::size_t t) {
        return frames.data() + t * spec.n_pixels();
    }
    std::uint8_t at(std::size_t t, int i, int j) const {
        return frames[t * spec.n_pixels() + spec.index(i, j)];
    }
    void validate() const;
};

/// Per-pixel mean cloud fraction Omega and the availability A = 1 - Omega.
struct AvailabilityGrid {
    GridSpec spec;
    std::vector<double> omega;
    std::vector<std::int64_t> n_samples;

    double availability(std::size_t p) const { return 1.0 - omega[p]; }
};

/// ROI-averaged cloud fraction per frame plus its binarised form.
struct SiteSeries {
    Site site;
    std::vector<std::int64_t> timestamps;
    std::vector<double> cloud_fraction;
    std::vector<std::uint8_t> binary;
    double threshold = 0.5;
    std::string source_id;

    std::size_t size() const { return timestamps.size(); }
    double omega_fraction() const;  // time-mean of cloud_fraction
    double omega_binary() const;    // time-mean of the thresholded series
};

/// Monthly availability climatology. Months with no data are flagged absent
/// rather than reported as zero.
struct SeasonalProfile {
    std::array<double, 12> availability{};
    std::array<double, 12> stddev{};
    std::array<bool, 12> present{};
    std::vector<std::string> flagged_sources;  // outlier candidates, flag-only
};

struct CivilDate {
    int year;
    unsigned month;  // 1..12
    unsigned day;    // 1..31
};

CivilDate civil_from_epoch(std::int64_t epoch_s);
std::int64_t epoch_from_civil(int year, unsigned month, unsigned day);

AvailabilityGrid availability_grid(const CloudMaskSeries& series);

/// Pixel containing a site's coordinates; throws if the site is outside the
/// grid or its ROI spills over the edge.
std::pair<int, int> site_pixel(const GridSpec& spec, const Site& site);

SiteSeries extract_site_series(const CloudMaskSeries& series, const Site& site,
                               double threshold = 0.5);

SeasonalProfile seasonal_profile(const std::vector<SiteSeries>& by_source,
                                 double outlier_z = 3.0);

/// Block-mode resolution reduction: each block x block cell becomes cloudy
/// when a strict majority of its pixels are cloudy. Dimensions must divide.
CloudMaskSeries block_downsample(const CloudMaskSeries& series, int block);

}  // namespace ogsnet
