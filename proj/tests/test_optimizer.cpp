#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ogsnet/optimizer.hpp"
#include "ogsnet/synth.hpp"

using namespace ogsnet;

namespace {

GridSpec square_grid(int n) {
    GridSpec g;
    g.n_lat = n;
    g.n_lon = n;
    g.lat_min = -45.0;
    g.lat_max = g.lat_min + n;
    g.lon_min = 115.0;
    g.lon_max = g.lon_min + n;
    return g;
}

// Omega field with Gaussian depressions ("basins") on a cloudy background.
std::vector<double> basin_field(const GridSpec& g,
                                const std::vector<std::array<double, 3>>& basins,
                                double background = 0.7) {
    std::vector<double> omega(g.n_pixels(), background);
    for (int i = 0; i < g.n_lat; ++i)
        for (int j = 0; j < g.n_lon; ++j) {
            double v = background;
            for (const auto& b : basins) {
                const double d2 = (i - b[0]) * (i - b[0]) + (j - b[1]) * (j - b[1]);
                v -= b[2] * std::exp(-d2 / 40.0);
            }
            omega[g.index(i, j)] = std::min(0.95, std::max(0.05, v));
        }
    return omega;
}

// Exhaustive oracle for one greedy step, recomputed from first principles:
// pearson of each pixel's series against every selected site's series.
std::size_t brute_force_argmin(const CloudMaskSeries& series,
                               const std::vector<Site>& selected,
                               const Weights& weights,
                               const std::vector<std::uint8_t>& mask) {
    const AvailabilityGrid avail = availability_grid(series);
    const GridSpec& g = series.spec;

    std::vector<std::vector<std::uint8_t>> site_bin;
    for (const Site& s : selected)
        site_bin.push_back(extract_site_series(series, s).binary);

    std::size_t best = g.n_pixels();
    double best_v = 0.0;
    std::vector<std::uint8_t> pix(series.n_frames());
    for (std::size_t p = 0; p < g.n_pixels(); ++p) {
        if (mask[p]) continue;
        double value;
        if (selected.empty()) {
            value = avail.omega[p];
        } else {
            for (std::size_t t = 0; t < series.n_frames(); ++t)
                pix[t] = series.frames[t * g.n_pixels() + p];
            double corr = 0.0;
            for (std::size_t k = 0; k < selected.size(); ++k)
                corr += weights.site_weight(k) * pearson(site_bin[k], pix).r;
            corr /= double(selected.size());
            const double sw =
                weights.spatial_weight.empty() ? 1.0 : weights.spatial_weight[p];
            const double a = weights.w0 * avail.omega[p] *
                             (weights.spatial_applies_to_w0 ? sw : 1.0);
            const double b = corr * sw;
            value = a * a + b * b;
        }
        if (best == g.n_pixels() || value < best_v) {
            best = p;
            best_v = value;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("select_first: unique minimum and tie-break") {
    GridSpec g = square_grid(10);
    AvailabilityGrid avail;
    avail.spec = g;
    avail.omega.assign(g.n_pixels(), 0.6);
    avail.n_samples.assign(g.n_pixels(), 10);
    avail.omega[g.index(3, 7)] = 0.1;
    const auto [i, j] = select_first(avail, {});
    CHECK(i == 3);
    CHECK(j == 7);

    // Uniform field: lexicographic tie-break picks (0, 0).
    avail.omega.assign(g.n_pixels(), 0.5);
    const auto [i0, j0] = select_first(avail, {});
    CHECK(i0 == 0);
    CHECK(j0 == 0);

    // Fully masked grid errors.
    std::vector<std::uint8_t> all(g.n_pixels(), 1);
    CHECK_THROWS(select_first(avail, all));
}

TEST_CASE("select_first: deeper basin wins (exhaustive oracle)") {
    GridSpec g = square_grid(40);
    const auto omega = basin_field(g, {{10, 10, 0.3}, {30, 30, 0.5}});
    AvailabilityGrid avail{g, omega, std::vector<std::int64_t>(g.n_pixels(), 1)};
    const auto [i, j] = select_first(avail, {});
    std::size_t best = 0;
    for (std::size_t p = 1; p < g.n_pixels(); ++p)
        if (omega[p] < omega[best]) best = p;
    CHECK(g.index(i, j) == best);
    CHECK(i == 30);
    CHECK(j == 30);
}

TEST_CASE("objective surface hand values") {
    GridSpec g = square_grid(2);
    AvailabilityGrid avail{g, {0.0, 1.0, 0.5, 0.5},
                           std::vector<std::int64_t>(4, 1)};

    CorrelationSurface s1{g, {"a", 0, 0, 0}, {0.0, 1.0, 0.4, 0.0}, {0, 0, 0, 0}};
    Weights unit;

    // N = 1: clear uncorrelated pixel -> 0; cloudy perfectly correlated -> 2.
    const auto g1 = objective_surface(avail, {s1}, unit, {});
    CHECK(g1.g[0] == 0.0);
    CHECK(g1.g[1] == 2.0);

    // N = 2 at a pixel with omega 0.5, r = +0.4 and -0.4: the correlation
    // terms cancel and g = 0.25.
    CorrelationSurface s2{g, {"b", 0, 0, 0}, {0.0, 1.0, -0.4, 0.0}, {0, 0, 0, 0}};
    const auto g2 = objective_surface(avail, {s1, s2}, unit, {});
    CHECK(g2.g[2] == doctest::Approx(0.25).epsilon(1e-15));
    for (double v : g2.g) CHECK(v >= 0.0);
}

TEST_CASE("optimize with n = 1 reduces to select_first") {
    GridSpec g = square_grid(24);
    SynthSpec spec;
    spec.grid = g;
    spec.n_frames = 300;
    spec.corr_length_px = 3.0;
    spec.omega_field = basin_field(g, {{6, 6, 0.4}, {17, 17, 0.35}});
    spec.seed = 5;
    const auto series = synth_generate(spec);

    const auto result = optimize_network(series, 1, Weights{}, {});
    REQUIRE(result.sites.size() == 1);
    const AvailabilityGrid avail = availability_grid(series);
    const auto [i, j] = select_first(avail, {});
    CHECK(result.steps[0].pixel_ilat == i);
    CHECK(result.steps[0].pixel_jlon == j);
}

TEST_CASE("two independent basins get one site each") {
    GridSpec g = square_grid(36);
    SynthSpec spec;
    spec.grid = g;
    spec.n_frames = 600;
    spec.corr_length_px = 3.0;
    spec.omega_field = basin_field(g, {{9, 9, 0.45}, {27, 27, 0.4}});
    spec.seed = 9;
    const auto series = synth_generate(spec);

    const auto result = optimize_network(series, 2, Weights{}, {});
    REQUIRE(result.steps.size() == 2);
    auto basin_of = [&](const SelectionStep& s) {
        const double d1 = std::hypot(s.pixel_ilat - 9.0, s.pixel_jlon - 9.0);
        const double d2 = std::hypot(s.pixel_ilat - 27.0, s.pixel_jlon - 27.0);
        return d1 < d2 ? 1 : 2;
    };
    CHECK(basin_of(result.steps[0]) != basin_of(result.steps[1]));
}

TEST_CASE("every greedy step matches the exhaustive oracle") {
    GridSpec g = square_grid(30);
    SynthSpec spec;
    spec.grid = g;
    spec.n_frames = 250;
    spec.corr_length_px = 4.0;
    spec.omega_field = basin_field(g, {{8, 8, 0.4}, {20, 22, 0.35}, {14, 5, 0.3}});
    spec.seed = 31;
    const auto series = synth_generate(spec);

    Weights w;
    const auto result = optimize_network(series, 4, w, {});

    std::vector<Site> picked;
    std::vector<std::uint8_t> mask(g.n_pixels(), 0);
    for (const auto& step : result.steps) {
        const std::size_t expect = brute_force_argmin(series, picked, w, mask);
        CHECK(g.index(step.pixel_ilat, step.pixel_jlon) == expect);
        mask[expect] = 1;
        Site s{"p", g.lat_center(step.pixel_ilat), g.lon_center(step.pixel_jlon), 0};
        picked.push_back(s);
    }
}

TEST_CASE("seeded selection matches the oracle for the next pick") {
    GridSpec g = square_grid(30);
    SynthSpec spec;
    spec.grid = g;
    spec.n_frames = 250;
    spec.corr_length_px = 4.0;
    spec.omega_field = basin_field(g, {{7, 21, 0.4}, {22, 8, 0.35}});
    spec.seed = 77;
    const auto series = synth_generate(spec);

    const std::vector<Site> seeds = {
        {"seed1", g.lat_center(5), g.lon_center(5), 0},
        {"seed2", g.lat_center(15), g.lon_center(25), 0},
        {"seed3", g.lat_center(25), g.lon_center(12), 0},
    };
    Weights w;
    const auto result = optimize_network(series, 1, w, {}, seeds);
    REQUIRE(result.n_seeds == 3);
    REQUIRE(result.steps.size() == 1);

    std::vector<std::uint8_t> mask(g.n_pixels(), 0);
    for (const Site& s : seeds) {
        const auto [i, j] = site_pixel(g, s);
        mask[g.index(i, j)] = 1;
    }
    const std::size_t expect = brute_force_argmin(series, seeds, w, mask);
    CHECK(g.index(result.steps[0].pixel_ilat, result.steps[0].pixel_jlon) == expect);
}

TEST_CASE("selected pixels are never re-picked and g is positive there") {
    GridSpec g = square_grid(16);
    const auto series = synth_generate_uniform(g, 400, 2.0, 0.4, 3);
    const auto result = optimize_network(series, 6, Weights{}, {});
    std::vector<std::size_t> picks;
    for (const auto& s : result.steps)
        picks.push_back(g.index(s.pixel_ilat, s.pixel_jlon));
    std::sort(picks.begin(), picks.end());
    CHECK(std::adjacent_find(picks.begin(), picks.end()) == picks.end());

    // Self-correlation keeps g strictly positive at selected pixels.
    for (const auto& s : result.steps)
        CHECK(result.final_surface.g[g.index(s.pixel_ilat, s.pixel_jlon)] > 0.0);
    for (double v : result.final_surface.g) CHECK(v >= 0.0);
}

TEST_CASE("scaling all weights by two leaves the selection unchanged") {
    GridSpec g = square_grid(20);
    SynthSpec spec;
    spec.grid = g;
    spec.n_frames = 300;
    spec.corr_length_px = 3.0;
    spec.omega_field = basin_field(g, {{5, 5, 0.4}, {14, 14, 0.3}});
    spec.seed = 41;
    const auto series = synth_generate(spec);

    Weights w1;
    Weights w2;
    w2.w0 = 2.0;
    w2.wk.assign(8, 2.0);
    const auto r1 = optimize_network(series, 4, w1, {});
    const auto r2 = optimize_network(series, 4, w2, {});
    for (std::size_t k = 0; k < r1.steps.size(); ++k) {
        CHECK(r1.steps[k].pixel_ilat == r2.steps[k].pixel_ilat);
        CHECK(r1.steps[k].pixel_jlon == r2.steps[k].pixel_jlon);
    }
}

TEST_CASE("unit spatial weight is bit-identical to no spatial weight") {
    GridSpec g = square_grid(18);
    const auto series = synth_generate_uniform(g, 300, 2.5, 0.45, 8);
    Weights plain;
    Weights with_field;
    with_field.spatial_weight.assign(g.n_pixels(), 1.0);
    const auto r1 = optimize_network(series, 3, plain, {});
    const auto r2 = optimize_network(series, 3, with_field, {});
    CHECK(r1.final_surface.g == r2.final_surface.g);
    for (std::size_t k = 0; k < r1.steps.size(); ++k) {
        CHECK(r1.steps[k].pixel_ilat == r2.steps[k].pixel_ilat);
        CHECK(r1.steps[k].pixel_jlon == r2.steps[k].pixel_jlon);
    }
}

TEST_CASE("masked pixels are never selected; over-subscription errors") {
    GridSpec g = square_grid(6);
    const auto series = synth_generate_uniform(g, 200, 1.0, 0.5, 2);
    std::vector<std::uint8_t> mask(g.n_pixels(), 1);
    mask[g.index(2, 2)] = 0;
    mask[g.index(4, 4)] = 0;
    const auto result = optimize_network(series, 2, Weights{}, mask);
    for (const auto& s : result.steps) {
        const bool ok = (s.pixel_ilat == 2 && s.pixel_jlon == 2) ||
                        (s.pixel_ilat == 4 && s.pixel_jlon == 4);
        CHECK(ok);
    }
    CHECK_THROWS_AS(optimize_network(series, 3, Weights{}, mask),
                    std::invalid_argument);
}

TEST_CASE("minimum separation radius keeps sites apart") {
    GridSpec g = square_grid(20);
    const auto series = synth_generate_uniform(g, 300, 2.0, 0.4, 6);

    const auto spread = optimize_network(series, 4, Weights{}, {}, {}, 6);
    for (std::size_t a = 0; a < spread.steps.size(); ++a)
        for (std::size_t b = a + 1; b < spread.steps.size(); ++b) {
            const double d = std::hypot(
                spread.steps[a].pixel_ilat - spread.steps[b].pixel_ilat,
                spread.steps[a].pixel_jlon - spread.steps[b].pixel_jlon);
            CHECK(d >= 6.0);
        }

    // Radius zero is the default behaviour.
    const auto plain = optimize_network(series, 4, Weights{}, {});
    const auto zero = optimize_network(series, 4, Weights{}, {}, {}, 0);
    for (std::size_t k = 0; k < plain.steps.size(); ++k) {
        CHECK(plain.steps[k].pixel_ilat == zero.steps[k].pixel_ilat);
        CHECK(plain.steps[k].pixel_jlon == zero.steps[k].pixel_jlon);
    }
}

TEST_CASE("latitude weighting values") {
    CHECK(latitude_weighting(0.0) == 1.0);
    CHECK(std::fabs(latitude_weighting(-90.0) - 0.3295) < 1e-12);
    CHECK(std::fabs(latitude_weighting(-35.0) - 0.73925) < 1e-12);
    CHECK(latitude_weighting(20.0, 0.01) == doctest::Approx(1.2));
    CHECK_THROWS(latitude_weighting(100.0));
}

TEST_CASE("network report: single site and recomputation oracle") {
    GridSpec g = square_grid(12);
    const auto series = synth_generate_uniform(g, 5000, 2.0, 0.3, 55);

    Site one{"solo", g.lat_center(6), g.lon_center(6), 0};
    const auto solo_series = extract_site_series(series, one);
    const auto solo = network_report({solo_series}, 1000, 1);
    CHECK(solo.n_sites == 1);
    CHECK_FALSE(solo.rbar_defined);
    CHECK(solo.a_mean == doctest::Approx(1.0 - solo_series.omega_fraction()));
    CHECK(solo.p_outage == solo_series.omega_binary());

    std::vector<SiteSeries> multi;
    const int px[3][2] = {{2, 2}, {6, 9}, {10, 4}};
    for (auto& p : px) {
        Site s{"m", g.lat_center(p[0]), g.lon_center(p[1]), 0};
        multi.push_back(extract_site_series(series, s));
    }
    const auto report = network_report(multi, 500000, 2);

    double mean = 0.0;
    for (const auto& s : multi) mean += 1.0 - s.omega_fraction();
    mean /= 3.0;
    CHECK(report.a_mean == doctest::Approx(mean).epsilon(1e-12));
    const auto mac = mean_abs_correlation(correlation_matrix(multi));
    CHECK(report.rbar == doctest::Approx(mac.mean).epsilon(1e-12));
    CHECK(report.rbar_std == doctest::Approx(mac.stddev).epsilon(1e-12));
    CHECK(report.p_outage > 0.0);
    CHECK(report.p_outage < 0.2);
}
