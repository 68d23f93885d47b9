#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ogsnet/grid.hpp"

namespace ogsnet {

struct PearsonResult {
    double r = 0.0;
    bool zero_variance = false;  // r is defined as 0 when either side is constant
};

/// Pearson correlation of two equal-length binary series using population
/// (1/n) moments.
PearsonResult pearson(std::span<const std::uint8_t> a,
                      std::span<const std::uint8_t> b);

/// Population covariance mean[(a - mean a)(b - mean b)].
double covariance_pair(std::span<const std::uint8_t> a,
                       std::span<const std::uint8_t> b);

/// Pearson r between one site's binary series and every grid pixel.
struct CorrelationSurface {
    GridSpec spec;
    Site site;
    std::vector<double> r;
    std::vector<std::uint8_t> zero_variance;
};

CorrelationSurface correlation_surface(const CloudMaskSeries& series,
                                       const SiteSeries& site_series);

struct CorrelationMatrix {
    std::vector<Site> sites;
    std::vector<double> r;  // N x N row-major, symmetric, unit diagonal
    std::vector<std::uint8_t> zero_variance;  // per site

    int n() const { return int(sites.size()); }
    double at(int k, int l) const { return r[std::size_t(k) * sites.size() + l]; }
};

CorrelationMatrix correlation_matrix(const std::vector<SiteSeries>& series);

struct MeanAbsCorrelation {
    double mean = 0.0;
    double stddev = 0.0;  // population std over the upper-triangle entries
};

MeanAbsCorrelation mean_abs_correlation(const CorrelationMatrix& m);

/// Bernoulli covariance matrix of the sites' binary series (population
/// moments), the Gamma input for the joint availability model.
std::vector<double> covariance_matrix(const std::vector<SiteSeries>& series);

}  // namespace ogsnet
