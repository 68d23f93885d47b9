#include "ogsnet/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ogsnet/parallel.hpp"

namespace ogsnet {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;

double wrap_lon_deg(double lon) {
    lon = std::fmod(lon + 180.0, 360.0);
    if (lon < 0.0) lon += 360.0;
    return lon - 180.0;
}

struct Vec3 {
    double x, y, z;
};

Vec3 unit_from_latlon(double lat_deg, double lon_deg) {
    const double lat = lat_deg * kDeg;
    const double lon = lon_deg * kDeg;
    return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
            std::sin(lat)};
}

}  // namespace

void OrbitSpec::validate() const {
    if (!(altitude_km > 0.0))
        throw std::invalid_argument("OrbitSpec: altitude must be > 0");
    if (inclination_deg < 0.0 || inclination_deg > 180.0)
        throw std::invalid_argument("OrbitSpec: inclination outside [0, 180]");
}

double OrbitSpec::period_s() const {
    const double a = radius_km();
    return 2.0 * kPi * std::sqrt(a * a * a / kMuEarthKm3S2);
}

GeocentricPos propagate(const OrbitSpec& orbit, double t_s) {
    orbit.validate();
    const double dt = t_s - orbit.epoch_s;
    const double a = orbit.radius_km();
    const double mean_motion = std::sqrt(kMuEarthKm3S2 / (a * a * a));
    const double u = orbit.phase_deg * kDeg + mean_motion * dt;  // arg of latitude
    const double inc = orbit.inclination_deg * kDeg;

    const double sin_lat = std::sin(inc) * std::sin(u);
    const double lat = std::asin(std::clamp(sin_lat, -1.0, 1.0));
    const double lon_in_plane = std::atan2(std::cos(inc) * std::sin(u), std::cos(u));
    const double lon_inertial = orbit.raan_deg * kDeg + lon_in_plane;
    const double lon_ground = lon_inertial - kEarthRotRadPerS * dt;

    return {lat / kDeg, wrap_lon_deg(lon_ground / kDeg), a};
}

double elevation_deg(const Site& site, const GeocentricPos& sat) {
    const Vec3 us = unit_from_latlon(site.lat, site.lon);
    const Vec3 ut = unit_from_latlon(sat.lat_deg, sat.lon_deg);

    // Range vector from site to satellite; elevation is its angle above the
    // local horizontal plane (normal = us).
    const double rx = sat.radius_km * ut.x - kEarthRadiusKm * us.x;
    const double ry = sat.radius_km * ut.y - kEarthRadiusKm * us.y;
    const double rz = sat.radius_km * ut.z - kEarthRadiusKm * us.z;
    const double range = std::sqrt(rx * rx + ry * ry + rz * rz);
    if (range == 0.0) return 90.0;
    const double along_up = rx * us.x + ry * us.y + rz * us.z;
    return std::asin(std::clamp(along_up / range, -1.0, 1.0)) / kDeg;
}

GeocentricPos geo_position(double lon_deg) {
    return {0.0, wrap_lon_deg(lon_deg), kGeoRadiusKm};
}

CoverageRadius coverage_radius(double altitude_km, double min_elevation_deg) {
    if (!(altitude_km > 0.0))
        throw std::invalid_argument("coverage_radius: altitude must be > 0");
    if (!(min_elevation_deg > 0.0 && min_elevation_deg < 90.0))
        throw std::invalid_argument("coverage_radius: elevation outside (0, 90)");
    const double theta = min_elevation_deg * kDeg;
    const double ratio = kEarthRadiusKm / (kEarthRadiusKm + altitude_km);
    const double lambda = std::acos(ratio * std::cos(theta)) - theta;
    return {lambda / kDeg, kEarthRadiusKm * lambda};
}

std::vector<PassRecord> detect_passes(const OrbitSpec& orbit, const Site& site,
                                      double t0_s, double t1_s, double step_s,
                                      double min_elevation_deg) {
    orbit.validate();
    if (!(step_s > 0.0 && step_s <= 10.0))
        throw std::invalid_argument("detect_passes: step must be in (0, 10] s");
    if (!(t1_s - t0_s >= step_s))
        throw std::invalid_argument("detect_passes: window shorter than one step");

    auto elev = [&](double t) {
        return elevation_deg(site, propagate(orbit, t));
    };
    auto above = [&](double t) { return elev(t) > min_elevation_deg; };

    // Bisection refinement of a threshold crossing bracketed by [lo, hi]
    // (one side above, the other not); converges in time until the elevation
    // at the boundary matches the threshold to well under 1e-3 degrees.
    auto refine = [&](double lo, double hi, bool rising) {
        for (int it = 0; it < 64 && hi - lo > 1e-6; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (above(mid) == rising)
                hi = mid;
            else
                lo = mid;
        }
        return rising ? hi : lo;
    };

    std::vector<PassRecord> passes;
    bool in_pass = above(t0_s);
    double start = t0_s;
    double prev_t = t0_s;

    auto close_pass = [&](double end) {
        PassRecord rec;
        rec.site = site;
        rec.start_s = start;
        rec.end_s = end;
        rec.duration_s = end - start;
        // Peak elevation: coarse scan at <= 1 s then parabolic touch-up.
        const double scan = std::min(1.0, step_s);
        double best_t = start, best_e = -90.0;
        for (double t = start; t <= end; t += scan) {
            const double e = elev(t);
            if (e > best_e) {
                best_e = e;
                best_t = t;
            }
        }
        if (best_t - scan >= start && best_t + scan <= end) {
            const double e0 = elev(best_t - scan), e2 = elev(best_t + scan);
            const double denom = e0 - 2.0 * best_e + e2;
            if (denom < 0.0) {
                const double shift = 0.5 * (e0 - e2) / denom * scan;
                best_e = std::max(best_e, elev(best_t + shift));
            }
        }
        rec.max_elevation_deg = best_e;
        if (rec.duration_s > 0.0) passes.push_back(rec);
    };

    for (double t = t0_s + step_s;; t += step_s) {
        const bool clipped = t >= t1_s;
        const double tc = clipped ? t1_s : t;
        const bool now = above(tc);
        if (now && !in_pass) {
            start = refine(prev_t, tc, true);
            in_pass = true;
        } else if (!now && in_pass) {
            close_pass(refine(prev_t, tc, false));
            in_pass = false;
        }
        prev_t = tc;
        if (clipped) break;
    }
    if (in_pass) close_pass(t1_s);
    return passes;
}

PassProfile tau_profile(const Site& site,
                        const std::vector<double>& inclinations_deg,
                        double altitude_km, double days,
                        double min_elevation_deg, double step_s, int workers) {
    if (inclinations_deg.empty())
        throw std::invalid_argument("tau_profile: empty inclination sweep");
    if (!(days > 0.0)) throw std::invalid_argument("tau_profile: days must be > 0");

    PassProfile profile;
    profile.site = site;
    profile.inclinations_deg = inclinations_deg;
    profile.sim_days = days;
    profile.tau_s_per_day.assign(inclinations_deg.size(), 0.0);

    parallel_chunks(
        std::int64_t(inclinations_deg.size()), resolve_workers(workers),
        [&](std::int64_t c) {
            OrbitSpec orbit;
            orbit.altitude_km = altitude_km;
            orbit.inclination_deg = inclinations_deg[std::size_t(c)];
            const auto passes = detect_passes(orbit, site, 0.0, days * 86400.0,
                                              step_s, min_elevation_deg);
            double total = 0.0;
            for (const PassRecord& p : passes) total += p.duration_s;
            profile.tau_s_per_day[std::size_t(c)] = total / days;
        });
    return profile;
}

GeoVisibilityProfile geo_profile(const std::vector<Site>& network,
                                 const std::vector<double>& lon_sweep_deg,
                                 double min_elevation_deg,
                                 const OutageSampler& outage_sampler) {
    if (network.empty() || lon_sweep_deg.empty())
        throw std::invalid_argument("geo_profile: empty network or sweep");

    GeoVisibilityProfile out;
    out.longitudes_deg = lon_sweep_deg;
    out.visible_count.resize(lon_sweep_deg.size());
    out.visible_sites.resize(lon_sweep_deg.size());
    out.outage.resize(lon_sweep_deg.size());
    out.outage_ci95.resize(lon_sweep_deg.size());

    for (std::size_t q = 0; q < lon_sweep_deg.size(); ++q) {
        const GeocentricPos geo = geo_position(lon_sweep_deg[q]);
        for (int k = 0; k < int(network.size()); ++k)
            if (elevation_deg(network[std::size_t(k)], geo) > min_elevation_deg)
                out.visible_sites[q].push_back(k);
        out.visible_count[q] = int(out.visible_sites[q].size());
    }

    // One sampler run per distinct visible subset; contiguous longitudes with
    // the same subset share the estimate.
    std::map<std::vector<int>, std::pair<double, double>> cache;
    for (std::size_t q = 0; q < lon_sweep_deg.size(); ++q) {
        if (out.visible_sites[q].empty()) {
            out.outage[q] = 1.0;
            out.outage_ci95[q] = 0.0;
            continue;
        }
        auto it = cache.find(out.visible_sites[q]);
        if (it == cache.end())
            it = cache.emplace(out.visible_sites[q],
                               outage_sampler(out.visible_sites[q]))
                     .first;
        out.outage[q] = it->second.first;
        out.outage_ci95[q] = it->second.second;
    }
    return out;
}

}  // namespace ogsnet
