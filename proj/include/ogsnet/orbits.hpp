#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ogsnet/grid.hpp"

namespace ogsnet {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kMuEarthKm3S2 = 398600.4418;
constexpr double kEarthRotRadPerS = 7.2921159e-5;  // sidereal rate
constexpr double kGeoRadiusKm = kEarthRadiusKm + 35786.0;

/// Circular two-body orbit over a spherical Earth; no J2, no drag. The prime
/// meridian is aligned with the inertial reference direction at the epoch.
struct OrbitSpec {
    double altitude_km = 0.0;
    double inclination_deg = 0.0;
    double raan_deg = 0.0;   // ascending-node longitude at epoch
    double phase_deg = 0.0;  // initial argument of latitude
    double epoch_s = 0.0;

    double radius_km() const { return kEarthRadiusKm + altitude_km; }
    double period_s() const;
    void validate() const;
};

struct GeocentricPos {
    double lat_deg = 0.0;
    double lon_deg = 0.0;  // wrapped to [-180, 180)
    double radius_km = 0.0;
};

GeocentricPos propagate(const OrbitSpec& orbit, double t_s);

/// Elevation of a point above a site's local horizon, spherical Earth.
double elevation_deg(const Site& site, const GeocentricPos& sat);

/// Geostationary point at the given longitude.
GeocentricPos geo_position(double lon_deg);

struct CoverageRadius {
    double central_angle_deg = 0.0;
    double ground_range_km = 0.0;
};

/// Footprint radius for a given altitude and minimum elevation:
/// lambda = acos(R/(R+h) cos(theta)) - theta.
CoverageRadius coverage_radius(double altitude_km, double min_elevation_deg);

struct PassRecord {
    Site site;
    double start_s = 0.0;
    double end_s = 0.0;
    double max_elevation_deg = 0.0;
    double duration_s = 0.0;
};

/// Above-threshold intervals of a site/orbit pair over [t0, t1], sampled at
/// step_s (<= 10 s) with boundaries refined by bisection. Glancing passes
/// shorter than the sampling step may be missed; nothing else is filtered.
std::vector<PassRecord> detect_passes(const OrbitSpec& orbit, const Site& site,
                                      double t0_s, double t1_s, double step_s,
                                      double min_elevation_deg);

struct PassProfile {
    Site site;
    std::vector<double> inclinations_deg;
    std::vector<double> tau_s_per_day;  // mean daily link seconds per inclination
    double sim_days = 0.0;
};

/// tau(i) sweep: one orbit per inclination (fiducial raan = phase = 0,
/// epoch 0), simulated for the given number of days.
PassProfile tau_profile(const Site& site,
                        const std::vector<double>& inclinations_deg,
                        double altitude_km, double days,
                        double min_elevation_deg, double step_s = 10.0,
                        int workers = 0);

struct GeoVisibilityProfile {
    std::vector<double> longitudes_deg;
    std::vector<int> visible_count;
    std::vector<std::vector<int>> visible_sites;  // site indices per longitude
    std::vector<double> outage;                   // p_avail(M = 0)
    std::vector<double> outage_ci95;
};

/// Outage estimate for a visible subset of sites (by index), returning the
/// probability and its 95% half-width.
using OutageSampler =
    std::function<std::pair<double, double>(const std::vector<int>&)>;

/// GEO visibility sweep: per longitude the set of sites seeing the GEO above
/// the threshold; the outage sampler runs once per contiguous visibility
/// segment. Empty segments report outage 1.
GeoVisibilityProfile geo_profile(const std::vector<Site>& network,
                                 const std::vector<double>& lon_sweep_deg,
                                 double min_elevation_deg,
                                 const OutageSampler& outage_sampler);

}  // namespace ogsnet
