#pragma once

#include <string>
#include <vector>

#include "ogsnet/orbits.hpp"

namespace ogsnet {

/// Availability-corrected network link duration per inclination,
/// T(i) = sum_k A_k tau_k(i), and the data volume at a fixed bitrate.
/// Simultaneous multi-site visibility is double-counted by construction.
struct CapacityProfile {
    std::string label;
    std::vector<double> inclinations_deg;
    std::vector<double> t_s_per_day;
    std::vector<double> data_bits_per_day;
    double bitrate_bps = 5e9;
};

CapacityProfile network_capacity(const std::vector<double>& availabilities,
                                 const std::vector<PassProfile>& profiles,
                                 double bitrate_bps, const std::string& label);

/// Trapezoidal integral of T over the inclination sweep (for comparing
/// constellations uniform in inclination).
double capacity_integral(const CapacityProfile& profile);

struct NetworkComparison {
    std::string baseline;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> per_i_ratio;  // [network][inclination]
    std::vector<double> integral_ratio;
};

NetworkComparison compare_networks(const std::vector<CapacityProfile>& profiles,
                                   const std::string& baseline_label);

}  // namespace ogsnet
