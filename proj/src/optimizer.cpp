#include "ogsnet/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ogsnet/dgmodel.hpp"

namespace ogsnet {

namespace {

std::size_t argmin_unmasked(const std::vector<double>& values,
                            std::span<const std::uint8_t> mask) {
    std::size_t best = values.size();
    double best_v = 0.0;
    for (std::size_t p = 0; p < values.size(); ++p) {
        if (!mask.empty() && mask[p]) continue;
        if (best == values.size() || values[p] < best_v) {
            best = p;
            best_v = values[p];
        }
    }
    if (best == values.size())
        throw std::runtime_error("selection surface is fully masked");
    return best;
}

Site site_at_pixel(const GridSpec& spec, std::size_t p, int ordinal) {
    Site s;
    s.name = "opt_" + std::to_string(ordinal);
    const int i = int(p) / spec.n_lon;
    const int j = int(p) % spec.n_lon;
    s.lat = spec.lat_center(i);
    s.lon = spec.lon_center(j);
    s.roi_radius_px = 0;  // the optimiser works on single pixels
    return s;
}

}  // namespace

std::pair<int, int> select_first(const AvailabilityGrid& avail,
                                 std::span<const std::uint8_t> mask) {
    if (!mask.empty() && mask.size() != avail.omega.size())
        throw std::invalid_argument("select_first: mask size mismatch");
    const std::size_t p = argmin_unmasked(avail.omega, mask);
    return {int(p) / avail.spec.n_lon, int(p) % avail.spec.n_lon};
}

ObjectiveSurface objective_surface(const AvailabilityGrid& avail,
                                   const std::vector<CorrelationSurface>& surfaces,
                                   const Weights& weights,
                                   std::span<const std::uint8_t> mask) {
    if (surfaces.empty())
        throw std::invalid_argument("objective_surface: need >= 1 site surface");
    const std::size_t npix = avail.spec.n_pixels();
    for (const CorrelationSurface& s : surfaces)
        if (!(s.spec == avail.spec))
            throw std::invalid_argument("objective_surface: surface/grid mismatch");
    if (!weights.spatial_weight.empty() && weights.spatial_weight.size() != npix)
        throw std::invalid_argument("objective_surface: spatial weight size mismatch");
    if (weights.w0 < 0.0)
        throw std::invalid_argument("objective_surface: weights must be >= 0");
    for (double w : weights.wk)
        if (w < 0.0)
            throw std::invalid_argument("objective_surface: weights must be >= 0");

    const double inv_n = 1.0 / double(surfaces.size());
    ObjectiveSurface out;
    out.spec = avail.spec;
    out.n_selected = int(surfaces.size());
    out.g.resize(npix);
    out.mask.assign(mask.begin(), mask.end());

    for (std::size_t p = 0; p < npix; ++p) {
        const double sw =
            weights.spatial_weight.empty() ? 1.0 : weights.spatial_weight[p];
        double corr_term = 0.0;
        for (std::size_t k = 0; k < surfaces.size(); ++k)
            corr_term += weights.site_weight(k) * surfaces[k].r[p];
        corr_term *= inv_n * sw;
        const double avail_term =
            weights.w0 * avail.omega[p] * (weights.spatial_applies_to_w0 ? sw : 1.0);
        out.g[p] = avail_term * avail_term + corr_term * corr_term;
    }
    return out;
}

SelectionResult optimize_network(const CloudMaskSeries& series, int n_sites,
                                 const Weights& weights,
                                 std::vector<std::uint8_t> mask,
                                 const std::vector<Site>& seed_sites,
                                 int min_separation_px) {
    series.validate();
    if (n_sites < 1)
        throw std::invalid_argument("optimize_network: n_sites must be >= 1");
    if (min_separation_px < 0)
        throw std::invalid_argument("optimize_network: negative separation");
    const std::size_t npix = series.spec.n_pixels();
    if (mask.empty()) mask.assign(npix, 0);
    if (mask.size() != npix)
        throw std::invalid_argument("optimize_network: mask size mismatch");

    std::size_t unmasked = 0;
    for (std::uint8_t m : mask) unmasked += m ? 0 : 1;
    if (std::size_t(n_sites) > unmasked)
        throw std::invalid_argument(
            "optimize_network: n_sites exceeds unmasked pixels");

    const AvailabilityGrid avail = availability_grid(series);

    // Masks the picked pixel and, when a separation radius is set, its disc.
    auto exclude_around = [&](int ci, int cj) {
        mask[series.spec.index(ci, cj)] = 1;
        if (min_separation_px <= 0) return;
        const int r = min_separation_px;
        for (int i = std::max(0, ci - r); i <= std::min(series.spec.n_lat - 1, ci + r); ++i)
            for (int j = std::max(0, cj - r); j <= std::min(series.spec.n_lon - 1, cj + r); ++j)
                if ((i - ci) * (i - ci) + (j - cj) * (j - cj) < r * r)
                    mask[series.spec.index(i, j)] = 1;
    };

    SelectionResult result;
    result.n_seeds = int(seed_sites.size());

    std::vector<CorrelationSurface> surfaces;
    for (const Site& seed : seed_sites) {
        const SiteSeries ss = extract_site_series(series, seed);
        surfaces.push_back(correlation_surface(series, ss));
        result.sites.push_back(seed);
        const auto [si, sj] = site_pixel(series.spec, seed);
        exclude_around(si, sj);  // a seed pixel cannot be re-picked
    }

    for (int step = 0; step < n_sites; ++step) {
        std::size_t pick;
        double objective;
        if (surfaces.empty()) {
            const auto [i, j] = select_first(avail, mask);
            pick = series.spec.index(i, j);
            objective = avail.omega[pick];
        } else {
            const ObjectiveSurface g =
                objective_surface(avail, surfaces, weights, mask);
            pick = argmin_unmasked(g.g, mask);
            objective = g.g[pick];
        }

        const Site site =
            site_at_pixel(series.spec, pick, int(result.sites.size()) + 1);
        result.sites.push_back(site);
        result.steps.push_back(
            {int(pick) / series.spec.n_lon, int(pick) % series.spec.n_lon, objective});
        exclude_around(int(pick) / series.spec.n_lon, int(pick) % series.spec.n_lon);

        const SiteSeries ss = extract_site_series(series, site);
        surfaces.push_back(correlation_surface(series, ss));
    }

    result.final_surface = objective_surface(avail, surfaces, weights, mask);
    return result;
}

double latitude_weighting(double lat_deg, double slope) {
    if (lat_deg < -90.0 || lat_deg > 90.0)
        throw std::invalid_argument("latitude_weighting: latitude outside [-90, 90]");
    return slope * lat_deg + 1.0;
}

NetworkReport network_report(const std::vector<SiteSeries>& series,
                             std::int64_t n_mc, std::uint64_t seed,
                             int workers) {
    if (series.empty())
        throw std::invalid_argument("network_report: no site series");

    NetworkReport report;
    report.n_sites = int(series.size());

    std::vector<double> avail;
    for (const SiteSeries& s : series) avail.push_back(1.0 - s.omega_fraction());
    double mean = 0.0;
    for (double a : avail) mean += a;
    mean /= double(avail.size());
    double ss = 0.0;
    for (double a : avail) ss += (a - mean) * (a - mean);
    report.a_mean = mean;
    report.a_std = std::sqrt(ss / double(avail.size()));

    if (series.size() >= 2) {
        const MeanAbsCorrelation mac =
            mean_abs_correlation(correlation_matrix(series));
        report.rbar_defined = true;
        report.rbar = mac.mean;
        report.rbar_std = mac.stddev;
    }

    if (series.size() == 1) {
        // One site: the outage probability is the site's own cloud fraction.
        report.p_outage = series[0].omega_binary();
        report.p_outage_ci95 = 0.0;
        return report;
    }

    std::vector<double> omega;
    for (const SiteSeries& s : series) omega.push_back(s.omega_binary());
    const std::vector<double> gamma = covariance_matrix(series);
    const JointAvailabilityModel model = fit_model(omega, gamma);
    const OutageDistribution dist = sample(model, n_mc, seed, workers);
    report.p_outage = dist.cdf[0];
    report.p_outage_ci95 = dist.ci95[0];
    report.psd_repaired = model.psd_repaired;
    report.repair_delta = model.repair_delta;
    return report;
}

}  // namespace ogsnet
