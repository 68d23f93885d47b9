#include "ogsnet/capacity.hpp"

#include <stdexcept>

namespace ogsnet {

CapacityProfile network_capacity(const std::vector<double>& availabilities,
                                 const std::vector<PassProfile>& profiles,
                                 double bitrate_bps, const std::string& label) {
    if (profiles.empty())
        throw std::invalid_argument("network_capacity: no pass profiles");
    if (availabilities.size() != profiles.size())
        throw std::invalid_argument(
            "network_capacity: availabilities/profiles size mismatch");
    for (double a : availabilities)
        if (a < 0.0 || a > 1.0)
            throw std::invalid_argument("network_capacity: availability outside [0,1]");
    for (const PassProfile& p : profiles)
        if (p.inclinations_deg != profiles[0].inclinations_deg)
            throw std::invalid_argument(
                "network_capacity: inclination grids not aligned");

    CapacityProfile out;
    out.label = label;
    out.bitrate_bps = bitrate_bps;
    out.inclinations_deg = profiles[0].inclinations_deg;
    out.t_s_per_day.assign(out.inclinations_deg.size(), 0.0);
    for (std::size_t k = 0; k < profiles.size(); ++k)
        for (std::size_t i = 0; i < out.t_s_per_day.size(); ++i)
            out.t_s_per_day[i] += availabilities[k] * profiles[k].tau_s_per_day[i];

    out.data_bits_per_day.resize(out.t_s_per_day.size());
    for (std::size_t i = 0; i < out.t_s_per_day.size(); ++i)
        out.data_bits_per_day[i] = out.t_s_per_day[i] * bitrate_bps;
    return out;
}

double capacity_integral(const CapacityProfile& profile) {
    const auto& inc = profile.inclinations_deg;
    if (inc.size() < 2)
        throw std::invalid_argument("capacity_integral: need >= 2 inclination samples");
    double total = 0.0;
    for (std::size_t i = 1; i < inc.size(); ++i)
        total += 0.5 * (profile.t_s_per_day[i] + profile.t_s_per_day[i - 1]) *
                 (inc[i] - inc[i - 1]);
    return total;
}

NetworkComparison compare_networks(const std::vector<CapacityProfile>& profiles,
                                   const std::string& baseline_label) {
    if (profiles.empty())
        throw std::invalid_argument("compare_networks: no profiles");
    const CapacityProfile* base = nullptr;
    for (const CapacityProfile& p : profiles) {
        if (p.inclinations_deg != profiles[0].inclinations_deg)
            throw std::invalid_argument("compare_networks: mismatched inclination grids");
        if (p.label == baseline_label) base = &p;
    }
    if (!base)
        throw std::invalid_argument("compare_networks: baseline '" +
                                    baseline_label + "' not found");

    NetworkComparison out;
    out.baseline = baseline_label;
    const double base_integral = capacity_integral(*base);
    for (const CapacityProfile& p : profiles) {
        out.labels.push_back(p.label);
        std::vector<double> ratios(p.t_s_per_day.size());
        for (std::size_t i = 0; i < ratios.size(); ++i)
            ratios[i] = base->t_s_per_day[i] != 0.0
                            ? p.t_s_per_day[i] / base->t_s_per_day[i]
                            : (p.t_s_per_day[i] == 0.0 ? 1.0 : 0.0);
        out.per_i_ratio.push_back(std::move(ratios));
        out.integral_ratio.push_back(
            base_integral != 0.0 ? capacity_integral(p) / base_integral : 0.0);
    }
    return out;
}

}  // namespace ogsnet
