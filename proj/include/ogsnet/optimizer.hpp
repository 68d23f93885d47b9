#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ogsnet/correlation.hpp"
#include "ogsnet/grid.hpp"

namespace ogsnet {

/// Weights for the greedy objective. spatial_weight, when present, multiplies
/// every term per pixel (a latitude gradient or region preference); set
/// spatial_applies_to_w0 = false to leave the availability term unweighted.
struct Weights {
    double w0 = 1.0;
    std::vector<double> wk;              // per selected site; empty = all ones
    std::vector<double> spatial_weight;  // per pixel; empty = 1 everywhere
    bool spatial_applies_to_w0 = true;

    double site_weight(std::size_t k) const {
        return k < wk.size() ? wk[k] : 1.0;
    }
};

/// Greedy selection surface g >= 0; masked pixels are never selected.
struct ObjectiveSurface {
    GridSpec spec;
    std::vector<double> g;
    int n_selected = 0;
    std::vector<std::uint8_t> mask;  // 1 = excluded
};

struct SelectionStep {
    int pixel_ilat = 0;
    int pixel_jlon = 0;
    double objective = 0.0;  // value of the minimised surface at the pick
};

struct SelectionResult {
    std::vector<Site> sites;  // seeds first, then selections in pick order
    int n_seeds = 0;
    std::vector<SelectionStep> steps;  // one per selected (non-seed) site
    ObjectiveSurface final_surface;
};

/// First-site rule: argmin of mean cloud cover over unmasked pixels, ties
/// broken by lowest (row, column) in lexicographic order.
std::pair<int, int> select_first(const AvailabilityGrid& avail,
                                 std::span<const std::uint8_t> mask);

/// g_ij = (w0 Omega_ij)^2 + ((1/N) sum_k w_k r_ij(k))^2, the squared two-norm
/// of the availability term and the aggregated correlation term.
ObjectiveSurface objective_surface(const AvailabilityGrid& avail,
                                   const std::vector<CorrelationSurface>& surfaces,
                                   const Weights& weights,
                                   std::span<const std::uint8_t> mask);

/// Greedy loop: pick the argmin pixel, derive its correlation surface from
/// the series, rebuild g, repeat. Seed sites contribute their surfaces from
/// step one but are not re-selected; n_sites counts new sites beyond seeds.
/// min_separation_px > 0 additionally masks pixels within that Euclidean
/// distance of any network member (correlation alone separates sites by
/// default).
SelectionResult optimize_network(const CloudMaskSeries& series, int n_sites,
                                 const Weights& weights,
                                 std::vector<std::uint8_t> mask,
                                 const std::vector<Site>& seed_sites = {},
                                 int min_separation_px = 0);

/// Linear latitude preference for polar-orbit throughput, normalised to 1 at
/// the equator (default slope 0.00745 per degree).
double latitude_weighting(double lat_deg, double slope = 0.00745);

struct NetworkReport {
    int n_sites = 0;
    double a_mean = 0.0;  // mean availability (ROI fraction based)
    double a_std = 0.0;
    bool rbar_defined = false;  // undefined for a single site
    double rbar = 0.0;
    double rbar_std = 0.0;
    double p_outage = 0.0;  // p_avail(M = 0)
    double p_outage_ci95 = 0.0;
    bool psd_repaired = false;
    double repair_delta = 0.0;
};

/// Summary metrics for a set of extracted site series: mean availability,
/// mean absolute pairwise correlation and the model outage probability
/// (Monte Carlo from the measured marginals and covariances; exact for a
/// single site).
NetworkReport network_report(const std::vector<SiteSeries>& series,
                             std::int64_t n_mc, std::uint64_t seed,
                             int workers = 0);

}  // namespace ogsnet
