#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ogsnet/correlation.hpp"
#include "ogsnet/synth.hpp"

using namespace ogsnet;

namespace {

std::vector<std::uint8_t> random_binary(std::mt19937& rng, std::size_t n,
                                        double p = 0.5) {
    std::vector<std::uint8_t> v(n);
    std::bernoulli_distribution d(p);
    for (auto& x : v) x = d(rng) ? 1 : 0;
    return v;
}

std::vector<std::uint8_t> flipped(std::vector<std::uint8_t> v) {
    for (auto& x : v) x ^= 1;
    return v;
}

SiteSeries make_series(const std::string& name,
                       const std::vector<std::uint8_t>& binary) {
    SiteSeries s;
    s.site = {name, 0.0, 0.0, 0};
    for (std::size_t t = 0; t < binary.size(); ++t)
        s.timestamps.push_back(std::int64_t(t));
    s.binary = binary;
    s.cloud_fraction.assign(binary.begin(), binary.end());
    return s;
}

}  // namespace

TEST_CASE("pearson hand cases") {
    const std::vector<std::uint8_t> a = {0, 1, 0, 1};
    CHECK(pearson(a, a).r == 1.0);
    CHECK(pearson(a, flipped(a)).r == -1.0);

    // cov([0,0,1,1],[0,1,0,1]) = 0 by direct evaluation.
    const std::vector<std::uint8_t> c = {0, 0, 1, 1};
    const std::vector<std::uint8_t> d = {0, 1, 0, 1};
    CHECK(pearson(c, d).r == 0.0);
    CHECK_FALSE(pearson(c, d).zero_variance);
}

TEST_CASE("pearson zero-variance handling") {
    const std::vector<std::uint8_t> constant = {1, 1, 1, 1};
    const std::vector<std::uint8_t> mixed = {0, 1, 0, 1};
    const PearsonResult pr = pearson(constant, mixed);
    CHECK(pr.zero_variance);
    CHECK(pr.r == 0.0);
}

TEST_CASE("pearson bounds, symmetry and relabeling (fuzzed)") {
    std::mt19937 rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 8 + rng() % 120;
        auto a = random_binary(rng, n, 0.2 + 0.6 * (rng() % 100) / 100.0);
        auto b = random_binary(rng, n, 0.2 + 0.6 * (rng() % 100) / 100.0);
        const PearsonResult ab = pearson(a, b);
        CHECK(std::fabs(ab.r) <= 1.0 + 1e-12);
        CHECK(pearson(b, a).r == ab.r);
        if (!ab.zero_variance) {
            // Relabeling 0<->1 on both series leaves r; on one negates it.
            CHECK(pearson(flipped(a), flipped(b)).r ==
                  doctest::Approx(ab.r).epsilon(1e-12));
            CHECK(pearson(flipped(a), b).r == doctest::Approx(-ab.r).epsilon(1e-12));
        }
    }
}

TEST_CASE("covariance hand case and identity with pearson") {
    const std::vector<std::uint8_t> a = {0, 1, 0, 1};
    CHECK(covariance_pair(a, a) == 0.25);  // Bernoulli variance at 1/2

    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 16 + rng() % 64;
        const auto x = random_binary(rng, n);
        const auto y = random_binary(rng, n);
        const PearsonResult pr = pearson(x, y);
        if (pr.zero_variance) continue;
        const double vx = covariance_pair(x, x);
        const double vy = covariance_pair(y, y);
        CHECK(std::fabs(covariance_pair(x, y) - pr.r * std::sqrt(vx * vy)) < 1e-12);
    }
}

TEST_CASE("independent covariance null") {
    std::mt19937 rng(31);
    const std::size_t n = 40000;
    const auto x = random_binary(rng, n);
    const auto y = random_binary(rng, n);
    CHECK(std::fabs(covariance_pair(x, y)) < 4.0 * 0.25 / std::sqrt(double(n)));
}

TEST_CASE("correlation surface: identical pixels give r = 1") {
    GridSpec g{3, 3, 0.0, 3.0, 0.0, 3.0};
    CloudMaskSeries s;
    s.spec = g;
    s.source_id = "t";
    std::mt19937 rng(3);
    for (int t = 0; t < 50; ++t) {
        s.timestamps.push_back(t);
        const std::uint8_t v = rng() & 1;
        for (std::size_t p = 0; p < g.n_pixels(); ++p) s.frames.push_back(v);
    }
    Site site{"c", g.lat_center(1), g.lon_center(1), 0};
    const auto surf = correlation_surface(s, extract_site_series(s, site));
    for (std::size_t p = 0; p < g.n_pixels(); ++p) {
        CHECK(surf.r[p] == 1.0);
        CHECK_FALSE(surf.zero_variance[p]);
    }
}

TEST_CASE("correlation surface: own pixel exactly 1, constants masked") {
    GridSpec g{2, 2, 0.0, 2.0, 0.0, 2.0};
    CloudMaskSeries s;
    s.spec = g;
    s.source_id = "t";
    std::mt19937 rng(9);
    for (int t = 0; t < 64; ++t) {
        s.timestamps.push_back(t);
        s.frames.push_back(rng() & 1);  // (0,0): random
        s.frames.push_back(1);          // (0,1): constant cloud
        s.frames.push_back(rng() & 1);  // (1,0): random
        s.frames.push_back(0);          // (1,1): constant clear
    }
    Site site{"o", g.lat_center(0), g.lon_center(0), 0};
    const auto surf = correlation_surface(s, extract_site_series(s, site));
    CHECK(surf.r[g.index(0, 0)] == 1.0);
    CHECK(surf.zero_variance[g.index(0, 1)] == 1);
    CHECK(surf.zero_variance[g.index(1, 1)] == 1);
    CHECK(surf.r[g.index(0, 1)] == 0.0);
}

TEST_CASE("correlation surface decays radially on correlated fields") {
    GridSpec g{40, 40, -40.0, 0.0, 120.0, 160.0};
    const int n = 2500;
    const auto s = synth_generate_uniform(g, n, 6.0, 0.4, 21);
    Site site{"c", g.lat_center(20), g.lon_center(20), 0};
    const auto surf = correlation_surface(s, extract_site_series(s, site));

    // Radial averages over annuli around the site must decrease.
    auto annulus_mean = [&](double r0, double r1) {
        double sum = 0.0;
        int count = 0;
        for (int i = 0; i < g.n_lat; ++i)
            for (int j = 0; j < g.n_lon; ++j) {
                const double d = std::hypot(i - 20.0, j - 20.0);
                if (d >= r0 && d < r1) {
                    sum += surf.r[g.index(i, j)];
                    ++count;
                }
            }
        return sum / count;
    };
    const double near = annulus_mean(0.0, 3.0);
    const double mid = annulus_mean(5.0, 8.0);
    const double far = annulus_mean(12.0, 16.0);
    CHECK(near > mid);
    CHECK(mid > far);
}

TEST_CASE("correlation surface null distribution on independent pixels") {
    GridSpec g{24, 24, -40.0, -16.0, 120.0, 144.0};
    const int n = 4000;
    const auto s = synth_generate_uniform(g, n, 0.01, 0.5, 33);
    Site site{"c", g.lat_center(12), g.lon_center(12), 0};
    const auto surf = correlation_surface(s, extract_site_series(s, site));

    const double bound = 4.0 / std::sqrt(double(n));
    int within = 0, total = 0;
    for (int i = 0; i < g.n_lat; ++i)
        for (int j = 0; j < g.n_lon; ++j) {
            if (i == 12 && j == 12) continue;
            ++total;
            if (std::fabs(surf.r[g.index(i, j)]) < bound) ++within;
        }
    CHECK(double(within) / total >= 0.99);
}

TEST_CASE("correlation surface requires aligned timestamps") {
    GridSpec g{2, 2, 0.0, 2.0, 0.0, 2.0};
    CloudMaskSeries s;
    s.spec = g;
    s.source_id = "t";
    for (int t = 0; t < 8; ++t) {
        s.timestamps.push_back(t);
        for (int p = 0; p < 4; ++p) s.frames.push_back((t + p) & 1);
    }
    Site site{"c", g.lat_center(0), g.lon_center(0), 0};
    SiteSeries ss = extract_site_series(s, site);
    ss.timestamps[3] += 1;
    CHECK_THROWS_AS(correlation_surface(s, ss), std::invalid_argument);
}

TEST_CASE("correlation matrix structure and consistency with pearson") {
    std::mt19937 rng(55);
    std::vector<SiteSeries> series;
    for (int k = 0; k < 4; ++k)
        series.push_back(make_series("s" + std::to_string(k),
                                     random_binary(rng, 600, 0.3 + 0.1 * k)));
    const CorrelationMatrix m = correlation_matrix(series);
    REQUIRE(m.n() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(m.at(k, k) == 1.0);
        for (int l = 0; l < 4; ++l) {
            CHECK(std::fabs(m.at(k, l) - m.at(l, k)) < 1e-12);
            if (k != l)
                CHECK(m.at(k, l) ==
                      doctest::Approx(pearson(series[k].binary, series[l].binary).r)
                          .epsilon(1e-15));
        }
    }

    // Two identical series: all ones.
    const auto dup = correlation_matrix({series[0], series[0]});
    for (double v : dup.r) CHECK(v == 1.0);
}

TEST_CASE("correlation matrix null for independent series") {
    std::mt19937 rng(77);
    const std::size_t n = 30000;
    std::vector<SiteSeries> series;
    for (int k = 0; k < 5; ++k)
        series.push_back(make_series("s" + std::to_string(k), random_binary(rng, n)));
    const CorrelationMatrix m = correlation_matrix(series);
    for (int k = 0; k < 5; ++k)
        for (int l = k + 1; l < 5; ++l)
            CHECK(std::fabs(m.at(k, l)) < 4.0 / std::sqrt(double(n)));
}

TEST_CASE("mean_abs_correlation hand case and reorder invariance") {
    CorrelationMatrix m;
    m.sites = {{"a", 0, 0, 0}, {"b", 0, 1, 0}, {"c", 0, 2, 0}};
    m.r = {1.0, 0.5, -0.5, 0.5, 1.0, 0.0, -0.5, 0.0, 1.0};
    const MeanAbsCorrelation mac = mean_abs_correlation(m);
    CHECK(mac.mean == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    // population std of {0.5, 0.5, 0}
    CHECK(mac.stddev == doctest::Approx(std::sqrt(1.0 / 18.0)).epsilon(1e-12));

    // Reorder sites (permute rows/cols 0<->2): same statistic.
    CorrelationMatrix p;
    p.sites = {m.sites[2], m.sites[1], m.sites[0]};
    p.r = {1.0, 0.0, -0.5, 0.0, 1.0, 0.5, -0.5, 0.5, 1.0};
    const MeanAbsCorrelation mac2 = mean_abs_correlation(p);
    CHECK(mac2.mean == doctest::Approx(mac.mean).epsilon(1e-15));
    CHECK(mac2.stddev == doctest::Approx(mac.stddev).epsilon(1e-15));

    CorrelationMatrix zero;
    zero.sites = m.sites;
    zero.r = {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
    CHECK(mean_abs_correlation(zero).mean == 0.0);
}

TEST_CASE("covariance matrix matches pairwise covariance") {
    std::mt19937 rng(13);
    std::vector<SiteSeries> series;
    for (int k = 0; k < 3; ++k)
        series.push_back(make_series("s" + std::to_string(k), random_binary(rng, 500)));
    const auto gamma = covariance_matrix(series);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
            CHECK(gamma[std::size_t(k) * 3 + l] ==
                  doctest::Approx(covariance_pair(series[k].binary, series[l].binary))
                      .epsilon(1e-15));
}
