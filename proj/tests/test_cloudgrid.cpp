#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ogsnet/correlation.hpp"
#include "ogsnet/grid.hpp"
#include "ogsnet/synth.hpp"

using namespace ogsnet;

namespace {

GridSpec square_grid(int n, double deg_per_px = 1.0) {
    GridSpec g;
    g.n_lat = n;
    g.n_lon = n;
    g.lat_min = -40.0;
    g.lat_max = g.lat_min + n * deg_per_px;
    g.lon_min = 120.0;
    g.lon_max = g.lon_min + n * deg_per_px;
    return g;
}

CloudMaskSeries series_from_frames(const GridSpec& spec,
                                   const std::vector<std::vector<std::uint8_t>>& fr) {
    CloudMaskSeries s;
    s.spec = spec;
    s.source_id = "test";
    for (std::size_t t = 0; t < fr.size(); ++t) {
        s.timestamps.push_back(std::int64_t(t) * 3600);
        s.frames.insert(s.frames.end(), fr[t].begin(), fr[t].end());
    }
    return s;
}

}  // namespace

TEST_CASE("availability_grid hand cases") {
    const GridSpec g = square_grid(1);
    const auto s = series_from_frames(g, {{0}, {0}, {1}, {1}});
    const AvailabilityGrid a = availability_grid(s);
    CHECK(a.omega[0] == 0.5);
    CHECK(a.availability(0) == 0.5);
    CHECK(a.n_samples[0] == 4);

    const auto clear = series_from_frames(square_grid(2), {std::vector<std::uint8_t>(4, 0)});
    const AvailabilityGrid ac = availability_grid(clear);
    for (std::size_t p = 0; p < 4; ++p) CHECK(ac.availability(p) == 1.0);
}

TEST_CASE("availability equals the exact arithmetic mean") {
    // 1e5 frames of a deterministic pattern on one pixel: the time average
    // must be the exact rational count/n, no accumulation drift.
    const GridSpec g = square_grid(1);
    CloudMaskSeries s;
    s.spec = g;
    s.source_id = "test";
    std::int64_t ones = 0;
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
        s.timestamps.push_back(t);
        const std::uint8_t v = (t % 7 == 0 || t % 3 == 1) ? 1 : 0;
        ones += v;
        s.frames.push_back(v);
    }
    const AvailabilityGrid a = availability_grid(s);
    CHECK(a.omega[0] == double(ones) / double(n));
}

TEST_CASE("availability of a synthetic target sits inside the binomial CI") {
    const GridSpec g = square_grid(4);
    const int n = 20000;
    const auto s = synth_generate_uniform(g, n, 0.4, 0.31, 99);
    const AvailabilityGrid a = availability_grid(s);
    const double sigma = std::sqrt(0.31 * 0.69 / n);
    for (std::size_t p = 0; p < g.n_pixels(); ++p)
        CHECK(std::fabs(a.omega[p] - 0.31) < 4.0 * sigma);
}

TEST_CASE("extract_site_series: roi 0 reproduces the pixel series") {
    const GridSpec g = square_grid(3);
    std::mt19937 rng(5);
    std::vector<std::vector<std::uint8_t>> frames;
    for (int t = 0; t < 40; ++t) {
        std::vector<std::uint8_t> f(g.n_pixels());
        for (auto& v : f) v = rng() & 1;
        frames.push_back(f);
    }
    const auto s = series_from_frames(g, frames);
    Site site{"px", g.lat_center(1), g.lon_center(2), 0};
    const SiteSeries ss = extract_site_series(s, site);
    for (std::size_t t = 0; t < s.n_frames(); ++t) {
        CHECK(ss.cloud_fraction[t] == double(s.at(t, 1, 2)));
        CHECK(ss.binary[t] == s.at(t, 1, 2));
    }
    // Binarising then averaging commutes with the availability reduction.
    const AvailabilityGrid a = availability_grid(s);
    CHECK(ss.omega_binary() == a.omega[g.index(1, 2)]);
}

TEST_CASE("extract_site_series ROI averaging and thresholding") {
    const GridSpec g = square_grid(3);
    // Frame with 5 of the 9 cells cloudy.
    std::vector<std::uint8_t> f = {1, 0, 1, 0, 1, 0, 1, 0, 1};
    const auto s = series_from_frames(g, {f});
    Site site{"mid", g.lat_center(1), g.lon_center(1), 1};

    const SiteSeries ss = extract_site_series(s, site);
    CHECK(ss.cloud_fraction[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
    CHECK(ss.binary[0] == 1);

    // binary[t] = 1 exactly when fraction >= threshold.
    const SiteSeries at_exact = extract_site_series(s, site, 5.0 / 9.0);
    CHECK(at_exact.binary[0] == 1);
    const SiteSeries above = extract_site_series(s, site, 5.0 / 9.0 + 1e-12);
    CHECK(above.binary[0] == 0);

    // threshold 1.0: binary only when the whole ROI is cloudy.
    const SiteSeries strict = extract_site_series(s, site, 1.0);
    CHECK(strict.binary[0] == 0);
    const auto all_cloudy = series_from_frames(g, {std::vector<std::uint8_t>(9, 1)});
    CHECK(extract_site_series(all_cloudy, site, 1.0).binary[0] == 1);
}

TEST_CASE("extract_site_series rejects out-of-grid ROI") {
    const GridSpec g = square_grid(3);
    const auto s = series_from_frames(g, {std::vector<std::uint8_t>(9, 0)});
    Site corner{"corner", g.lat_center(0), g.lon_center(0), 1};
    CHECK_THROWS_AS(extract_site_series(s, corner), std::invalid_argument);
    Site outside{"out", g.lat_max + 5.0, g.lon_center(0), 0};
    CHECK_THROWS_AS(extract_site_series(s, outside), std::invalid_argument);
}

TEST_CASE("civil date conversion") {
    CHECK(civil_from_epoch(0).year == 1970);
    CHECK(civil_from_epoch(0).month == 1);
    CHECK(civil_from_epoch(0).day == 1);
    // 2015-07-07 00:00:00 UTC
    const std::int64_t e = epoch_from_civil(2015, 7, 7);
    CHECK(e == 1436227200);
    CHECK(civil_from_epoch(e + 86399).day == 7);
    CHECK(civil_from_epoch(e + 86400).day == 8);
    CHECK(civil_from_epoch(epoch_from_civil(2016, 2, 29)).month == 2);
}

namespace {

SiteSeries constant_series(const std::string& source, double omega,
                           int years = 1) {
    SiteSeries s;
    s.site = {"x", -30.0, 130.0, 0};
    s.source_id = source;
    for (int y = 0; y < years; ++y)
        for (int m = 1; m <= 12; ++m)
            for (int d = 1; d <= 28; d += 7) {
                s.timestamps.push_back(epoch_from_civil(2015 + y, unsigned(m), unsigned(d)));
                s.cloud_fraction.push_back(omega);
                s.binary.push_back(omega >= 0.5 ? 1 : 0);
            }
    return s;
}

}  // namespace

TEST_CASE("seasonal_profile: constant source") {
    const auto profile = seasonal_profile({constant_series("a", 0.3)});
    for (int m = 0; m < 12; ++m) {
        REQUIRE(profile.present[m]);
        CHECK(profile.availability[m] == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(profile.stddev[m] == 0.0);
    }
    CHECK(profile.flagged_sources.empty());
}

TEST_CASE("seasonal_profile: two sources average and spread") {
    const auto profile =
        seasonal_profile({constant_series("a", 0.4), constant_series("b", 0.2)});
    for (int m = 0; m < 12; ++m) {
        CHECK(profile.availability[m] == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(profile.stddev[m] == doctest::Approx(0.1).epsilon(1e-12));
    }
}

TEST_CASE("seasonal_profile: empty months flagged absent, not zero") {
    SiteSeries s = constant_series("a", 0.5);
    // Keep only January-June frames.
    SiteSeries half;
    half.site = s.site;
    half.source_id = s.source_id;
    for (std::size_t t = 0; t < s.size(); ++t)
        if (civil_from_epoch(s.timestamps[t]).month <= 6) {
            half.timestamps.push_back(s.timestamps[t]);
            half.cloud_fraction.push_back(s.cloud_fraction[t]);
            half.binary.push_back(s.binary[t]);
        }
    const auto profile = seasonal_profile({half});
    for (int m = 0; m < 6; ++m) CHECK(profile.present[m]);
    for (int m = 6; m < 12; ++m) CHECK_FALSE(profile.present[m]);
}

TEST_CASE("seasonal_profile: outlier source flagged by z-score") {
    // Annual availabilities {0.7, 0.7, 0.2}: the third source sits sqrt(2)
    // cross-source sigmas out, so it flags at z = 1.2 and not at z = 1.5.
    const std::vector<SiteSeries> sources = {constant_series("a", 0.3),
                                             constant_series("b", 0.3),
                                             constant_series("bad", 0.8)};
    const auto flagged = seasonal_profile(sources, 1.2);
    REQUIRE(flagged.flagged_sources.size() == 1);
    CHECK(flagged.flagged_sources[0] == "bad");
    CHECK(seasonal_profile(sources, 1.5).flagged_sources.empty());
    // Default z = 3 cannot trigger with three sources (max attainable sqrt 2).
    CHECK(seasonal_profile(sources).flagged_sources.empty());
}

TEST_CASE("seasonal monthly means recombine to the annual mean") {
    // Non-constant series: weight monthly availability by frame counts.
    SiteSeries s;
    s.site = {"x", -30.0, 130.0, 0};
    s.source_id = "a";
    std::mt19937 rng(17);
    for (int m = 1; m <= 12; ++m)
        for (int d = 1; d <= (m % 3 ? 25 : 10); ++d) {
            s.timestamps.push_back(epoch_from_civil(2019, unsigned(m), unsigned(d)));
            s.cloud_fraction.push_back((rng() % 1000) / 1000.0);
            s.binary.push_back(s.cloud_fraction.back() >= 0.5 ? 1 : 0);
        }
    const auto profile = seasonal_profile({s});

    std::array<std::int64_t, 12> counts{};
    for (std::int64_t t : s.timestamps) ++counts[civil_from_epoch(t).month - 1];
    double weighted = 0.0;
    std::int64_t total = 0;
    for (int m = 0; m < 12; ++m) {
        weighted += profile.availability[m] * double(counts[m]);
        total += counts[m];
    }
    CHECK(std::fabs(weighted / double(total) - (1.0 - s.omega_fraction())) < 1e-12);
}

TEST_CASE("synth_generate statistical contracts") {
    const GridSpec g = square_grid(4);
    const int n = 10000;
    const auto s = synth_generate_uniform(g, n, 0.01, 0.5, 4);
    const AvailabilityGrid a = availability_grid(s);
    for (std::size_t p = 0; p < g.n_pixels(); ++p)
        CHECK(std::fabs(a.omega[p] - 0.5) < 0.015);  // 3 sigma binomial

    // corr_length -> 0: adjacent pixels essentially uncorrelated.
    std::vector<std::uint8_t> s00(n), s01(n);
    for (int t = 0; t < n; ++t) {
        s00[t] = s.at(std::size_t(t), 0, 0);
        s01[t] = s.at(std::size_t(t), 0, 1);
    }
    CHECK(std::fabs(pearson(s00, s01).r) < 4.0 / std::sqrt(double(n)));
}

TEST_CASE("synth correlation decays with distance") {
    GridSpec g = square_grid(48);
    const int n = 3000;
    const auto s = synth_generate_uniform(g, n, 10.0, 0.4, 12);
    auto pixel_series = [&](int i, int j) {
        std::vector<std::uint8_t> v(std::size_t(n), 0);
        for (int t = 0; t < n; ++t) v[std::size_t(t)] = s.at(std::size_t(t), i, j);
        return v;
    };
    const auto base = pixel_series(24, 24);
    const double near = pearson(base, pixel_series(24, 25)).r;
    const double far = pearson(base, pixel_series(24, 44)).r;
    CHECK(near > far);
    CHECK(near > 0.5);
}

TEST_CASE("synth is bit-reproducible for a fixed seed") {
    const GridSpec g = square_grid(6);
    const auto a = synth_generate_uniform(g, 50, 2.0, 0.31, 77);
    const auto b = synth_generate_uniform(g, 50, 2.0, 0.31, 77);
    CHECK(a.frames == b.frames);
    const auto c = synth_generate_uniform(g, 50, 2.0, 0.31, 78);
    CHECK(a.frames != c.frames);
}

TEST_CASE("synth rejects degenerate omega") {
    const GridSpec g = square_grid(2);
    CHECK_THROWS_AS(synth_generate_uniform(g, 1, 1.0, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(synth_generate_uniform(g, 1, 1.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("block_downsample majority vote") {
    GridSpec g = square_grid(4);
    // One frame; upper-left 2x2 block has 3 cloudy cells, upper-right 2,
    // lower-left 1, lower-right 4.
    std::vector<std::uint8_t> f = {
        // row 0 (south)
        0, 1, 1, 1,
        // row 1
        0, 0, 1, 1,
        // row 2
        1, 1, 0, 1,
        // row 3
        1, 0, 1, 0,
    };
    const auto s = series_from_frames(g, {f});
    const auto d = block_downsample(s, 2);
    CHECK(d.spec.n_lat == 2);
    CHECK(d.spec.n_lon == 2);
    CHECK(d.spec.pixel_size() == doctest::Approx(2.0));
    CHECK(d.at(0, 0, 0) == 0);  // 1 of 4: clear
    CHECK(d.at(0, 0, 1) == 1);  // 4 of 4 in south-east block? count below
    // South-east block cells: (0,2),(0,3),(1,2),(1,3) = 1,1,1,1 -> cloudy.
    CHECK(d.at(0, 1, 0) == 1);  // north-west block: 1,1,1,0 -> 3 of 4
    CHECK(d.at(0, 1, 1) == 0);  // north-east block: 0,1,1,0 -> tie -> clear

    CHECK_THROWS_AS(block_downsample(s, 3), std::invalid_argument);
}

TEST_CASE("series validation catches bad inputs") {
    const GridSpec g = square_grid(2);
    auto s = series_from_frames(g, {std::vector<std::uint8_t>(4, 0)});
    s.frames[2] = 2;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    auto s2 = series_from_frames(g, {std::vector<std::uint8_t>(4, 0),
                                     std::vector<std::uint8_t>(4, 0)});
    s2.timestamps[1] = s2.timestamps[0];
    CHECK_THROWS_AS(s2.validate(), std::invalid_argument);
}
